"""Show that a rank-preserving confidence map moves ECE but not exits or EEFP.

    python3 scripts/rank_preserving.py --alphas 0.1,1,10
"""

import argparse

import numpy as np

from eeval import SynthConfig, TransformChain, build_curve, fit_temperatures, generate
from eeval.budget import default_q_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--alphas", default="0.1,1,10")
    args = ap.parse_args()

    ds = generate(SynthConfig(seed=args.seed))
    calib = ds.split("calib")
    temps = tuple(fit_temperatures(calib.logits, calib.labels))
    grid = default_q_grid()
    base = build_curve(ds, TransformChain(temps), grid)

    def row(label, curve):
        heads = curve.points[0].heads
        ece = " ".join(f"{h.ece:.3f}" for h in heads)
        eefp = " ".join("  -  " if h.eefp is None else f"{h.eefp:.3f}" for h in heads)
        print(f"{label:>10} | ECE {ece} | EEFP {eefp}")

    row("none", base)
    for a in (float(x) for x in args.alphas.split(",")):
        curve = build_curve(ds, TransformChain(temps, 1.0, a), grid)
        same = all(
            np.array_equal(p.result.per_sample_exit, b.result.per_sample_exit)
            for p, b in zip(curve.points, base.points)
        )
        row(f"alpha={a:g}", curve)
        print(f"{'':>10} | exit decisions identical at all {len(grid)} q: {same}")


if __name__ == "__main__":
    main()
