"""Command-line entry point: ``eeval {synth,calibrate,metrics,sweep,report}``.

Exit codes: 0 success, 1 computation error, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .budget import DEFAULT_Q_MAX, DEFAULT_Q_MIN, DEFAULT_Q_POINTS, default_q_grid
from .calibration import DEFAULT_BINS, expected_calibration_error, nll
from .data import correctness, load_dataset, save_dataset
from .errors import EevalError, InputError, InvalidConfig
from .failure import eefp_score
from .report import (
    fmt,
    read_curve_csv,
    render_svg,
    write_csv,
    write_curve_csv,
    write_metadata,
)
from .simulate import build_curve
from .synth import SynthConfig, generate
from .transforms import (
    TransformChain,
    confidence_table,
    fit_temperatures,
    load_temperatures,
    save_temperatures,
    softmax,
)


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _chain(args, num_exits: int) -> TransformChain:
    temps = load_temperatures(args.temps) if args.temps else None
    if temps is not None and len(temps) != num_exits:
        raise InvalidConfig(f"{args.temps}: {len(temps)} temperatures for {num_exits} exits")
    return TransformChain(temps, args.temp_mult, args.alpha)


def _add_chain_flags(p):
    p.add_argument("--temps", default=None, help="JSON array of per-head temperatures (default: all 1.0)")
    p.add_argument("--temp-mult", type=float, default=1.0, help="multiplier applied to every head's temperature")
    p.add_argument("--alpha", type=float, default=None, help="rank-preserving decalibration exponent (off if unset)")
    p.add_argument("--ece-bins", type=int, default=DEFAULT_BINS, help="equal-width ECE bins")


def cmd_synth(args) -> int:
    cfg = SynthConfig(
        seed=args.seed,
        samples=(args.samples_calib, args.samples_val, args.samples_test),
        num_exits=args.exits,
        num_classes=args.classes,
        head_skill=args.skill,
        signal_sharpness=args.sharpness,
        distortion_temperature=args.distortion_temp,
    )
    ds = generate(cfg)
    save_dataset(ds, args.out)
    sizes = ", ".join(f"{k}={v.num_samples}" for k, v in ds.splits.items())
    print(f"wrote {args.out}: J={ds.num_exits} C={ds.num_classes} seed={cfg.seed} {sizes}")
    return 0


def cmd_calibrate(args) -> int:
    ds = load_dataset(args.data)
    calib = ds.split("calib")
    temps = fit_temperatures(calib.logits, calib.labels)
    save_temperatures(temps, args.out)
    print("temperatures: " + ", ".join(f"{t:.4f}" for t in temps))
    return 0


def cmd_metrics(args) -> int:
    if args.ece_bins < 1:
        raise InvalidConfig("--ece-bins must be >= 1")
    ds = load_dataset(args.data)
    split = ds.split(args.split)
    chain = _chain(args, ds.num_exits)
    table = confidence_table(split.logits, chain)
    correct = correctness(split.logits, split.labels)
    eefp = eefp_score(table.conf, correct) + [None]
    temps = chain.temperatures(ds.num_exits)

    header = ["head", "accuracy", "ece", "eefp", "nll"]
    rows = []
    for j in range(ds.num_exits):
        probs = softmax(split.logits[:, j, :], temps[j])
        rows.append([
            str(j + 1),
            fmt(float(correct[:, j].mean())),
            fmt(expected_calibration_error(table.conf[:, j], correct[:, j], args.ece_bins)),
            fmt(eefp[j]),
            fmt(nll(probs, split.labels)),
        ])
    metadata = _metadata(args, chain, ece_bins=args.ece_bins, split=args.split)
    for key in sorted(metadata):
        print(f"# {key}={metadata[key]}")
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows([header] + rows)
    print(buf.getvalue(), end="")
    if args.debug:
        shown = min(split.num_samples, args.debug_samples)
        for j in range(ds.num_exits):
            order = np.argsort(-table.conf[:shown, j], kind="mergesort")
            ranking = " > ".join(f"{i}({table.conf[i, j]:.3f})" for i in order)
            print(f"# ranking head {j + 1}: {ranking}")
    if args.out:
        write_csv(args.out, header, rows)
        write_metadata(args.out, metadata)
    return 0


def cmd_sweep(args) -> int:
    if args.ece_bins < 1:
        raise InvalidConfig("--ece-bins must be >= 1")
    ds = load_dataset(args.data)
    chain = _chain(args, ds.num_exits)
    grid = default_q_grid(args.q_min, args.q_max, args.q_points)
    curve = build_curve(ds, chain, grid, args.ece_bins)
    write_curve_csv(curve, args.out)
    write_metadata(
        args.out,
        _metadata(args, chain, ece_bins=args.ece_bins, q_grid=grid, exit_costs=list(ds.exit_costs)),
    )
    first, last = curve.points[0].result, curve.points[-1].result
    print(
        f"wrote {args.out}: {len(curve.points)} points, cost {first.mean_cost:.4g}..{last.mean_cost:.4g}, "
        f"accuracy {first.accuracy:.4f}..{last.accuracy:.4f}"
    )
    return 0


def cmd_report(args) -> int:
    paths = [p for p in args.curves.split(",") if p]
    labels = [s for s in args.labels.split(",")] if args.labels else [Path(p).stem for p in paths]
    if len(labels) != len(paths):
        raise InputError(f"{len(paths)} curve files but {len(labels)} labels")
    curves = [read_curve_csv(p) for p in paths]
    Path(args.svg).write_text(render_svg(curves, labels), encoding="utf-8")
    print(f"wrote {args.svg} with {len(curves)} curves")
    return 0


def _metadata(args, chain, **extra) -> dict:
    meta = {
        "tool_version": __version__,
        "dataset": str(Path(args.data).resolve()),
        "chain": chain.describe(),
        "ece_scope": "all samples of the split, per head",
    }
    meta.update(extra)
    return meta


def build_parser() -> argparse.ArgumentParser:
    fmt_cls = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="eeval", description=__doc__.splitlines()[0], formatter_class=fmt_cls)
    parser.add_argument("--version", action="version", version=f"eeval {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset", formatter_class=fmt_cls)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=7, help="generator seed")
    p.add_argument("--samples-calib", type=int, default=2000, help="calibration split size")
    p.add_argument("--samples-val", type=int, default=5000, help="validation split size")
    p.add_argument("--samples-test", type=int, default=10000, help="test split size")
    p.add_argument("--exits", type=int, default=5, help="number of exits J")
    p.add_argument("--classes", type=int, default=10, help="number of classes C")
    p.add_argument("--skill", type=_float_list, default=None,
                   help="comma-separated per-head target accuracies (default: linear up to 0.9)")
    p.add_argument("--sharpness", type=float, default=5.0, help="confidence signal sharpness")
    p.add_argument("--distortion-temp", type=float, default=1.0,
                   help="temperature that refitting should recover (1.0 = calibrated)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("calibrate", help="fit per-head temperatures on the calib split", formatter_class=fmt_cls)
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--out", default="temps.json", help="output JSON file")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("metrics", help="per-head accuracy, ECE, EEFP and NLL", formatter_class=fmt_cls)
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--split", default="test", choices=["calib", "val", "test"], help="split to score")
    _add_chain_flags(p)
    p.add_argument("--out", default="metrics.csv", help="per-head CSV output (empty string to skip)")
    p.add_argument("--debug", action="store_true", help="print per-head confidence rankings")
    p.add_argument("--debug-samples", type=int, default=10, help="samples shown in rankings")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("sweep", help="cost-accuracy curve over a q grid", formatter_class=fmt_cls)
    p.add_argument("--data", required=True, help="dataset directory")
    _add_chain_flags(p)
    p.add_argument("--q-min", type=float, default=DEFAULT_Q_MIN, help="smallest q")
    p.add_argument("--q-max", type=float, default=DEFAULT_Q_MAX, help="largest q")
    p.add_argument("--q-points", type=int, default=DEFAULT_Q_POINTS, help="log-uniform grid size")
    p.add_argument("--out", required=True, help="curve CSV output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="three-panel SVG from curve CSVs", formatter_class=fmt_cls)
    p.add_argument("--curves", required=True, help="comma-separated curve CSV files")
    p.add_argument("--labels", default=None, help="comma-separated legend labels (default: file stems)")
    p.add_argument("--svg", required=True, help="SVG output path")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"eeval {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except EevalError as exc:
        print(f"eeval {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"eeval {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
