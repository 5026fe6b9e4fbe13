"""Cost-accuracy curves for calibrated, under- and over-confident temperatures.

Fits per-head temperatures on the calib split, scales them by each multiplier,
sweeps q, and writes one curve CSV per multiplier plus a combined SVG.

    python3 scripts/temperature_decalibration.py --seed 10 --out runs/temp
"""

import argparse
from pathlib import Path

import numpy as np

from eeval import SynthConfig, TransformChain, build_curve, fit_temperatures, generate
from eeval.budget import default_q_grid
from eeval.report import read_curve_csv, render_svg, write_curve_csv
from eeval.simulate import weak_dominance_fraction


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=10)
    ap.add_argument("--multipliers", default="1.0,3.0,0.3")
    ap.add_argument("--out", type=Path, default=Path("runs/temperature"))
    args = ap.parse_args()

    mults = [float(m) for m in args.multipliers.split(",")]
    args.out.mkdir(parents=True, exist_ok=True)
    ds = generate(SynthConfig(seed=args.seed))
    calib = ds.split("calib")
    temps = tuple(fit_temperatures(calib.logits, calib.labels))
    print("fitted temperatures:", np.round(temps, 3).tolist())

    grid = default_q_grid()
    paths, curves = [], {}
    for m in mults:
        curve = build_curve(ds, TransformChain(temps, m), grid)
        path = args.out / f"curve_x{m:g}.csv"
        write_curve_csv(curve, path)
        paths.append(path)
        curves[m] = curve
        eces = [h.ece for h in curve.points[0].heads]
        print(f"x{m:g}: accuracy {curve.points[0].result.accuracy:.4f}..{curve.points[-1].result.accuracy:.4f}, "
              f"mean ECE {np.mean(eces):.3f}")

    ref = curves[mults[0]].cost_accuracy()
    for m in mults[1:]:
        share = weak_dominance_fraction(curves[m].cost_accuracy(), ref)
        print(f"x{m:g} at or above x{mults[0]:g} on {share:.0%} of q points")

    svg = args.out / "report.svg"
    svg.write_text(render_svg([read_curve_csv(p) for p in paths], [f"x{m:g}" for m in mults]))
    print("wrote", svg)


if __name__ == "__main__":
    main()
