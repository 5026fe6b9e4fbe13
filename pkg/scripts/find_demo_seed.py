"""Scan generator seeds for how often x0.3 confidence beats calibrated confidence.

For each seed, reports the share of q points where the over-confident curve is
at or above the calibrated curve at the same mean cost.

    python3 scripts/find_demo_seed.py --seeds 0:16
"""

import argparse

from eeval import SynthConfig, TransformChain, build_curve, fit_temperatures, generate
from eeval.budget import default_q_grid
from eeval.simulate import weak_dominance_fraction


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", default="0:16", help="start:stop range")
    ap.add_argument("--multiplier", type=float, default=0.3)
    args = ap.parse_args()

    start, stop = (int(s) for s in args.seeds.split(":"))
    grid = default_q_grid()
    for seed in range(start, stop):
        ds = generate(SynthConfig(seed=seed))
        calib = ds.split("calib")
        temps = tuple(fit_temperatures(calib.logits, calib.labels))
        ref = build_curve(ds, TransformChain(temps), grid).cost_accuracy()
        hot = build_curve(ds, TransformChain(temps, args.multiplier), grid).cost_accuracy()
        print(f"seed {seed:3d}: {weak_dominance_fraction(hot, ref):.0%}")


if __name__ == "__main__":
    main()
