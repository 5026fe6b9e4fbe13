"""CSV serialization of curves and per-head metrics, plus a three-panel SVG."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from xml.sax.saxutils import escape

from .errors import InputError

NULL = "null"
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]
DASHES = ["", "8 4", "2 3", "10 3 2 3", "4 4", "1 2", "6 2"]


def fmt(x) -> str:
    """Shortest round-trip decimal; ``null`` for missing values."""
    if x is None:
        return NULL
    if isinstance(x, (bool,)):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def _parse(x: str):
    if x in ("", NULL):
        return None
    return float(x)


def curve_header(num_exits: int) -> list[str]:
    return (
        ["row", "q", "mean_cost", "accuracy"]
        + [f"exit_frac_{j + 1}" for j in range(num_exits)]
        + ["eef1_mean", "eef1_defined", "head", "head_cost", "acc_head", "ece", "eefp", "eef1"]
    )


def curve_rows(curve) -> list[list[str]]:
    rows = []
    for p in curve.points:
        J = len(p.heads)
        rows.append(
            ["curve", fmt(p.q), fmt(p.result.mean_cost), fmt(p.result.accuracy)]
            + [fmt(float(f)) for f in p.result.exit_fractions]
            + [fmt(p.eef1_mean), str(p.eef1_defined)]
            + [""] * 6
        )
        for h in p.heads:
            rows.append(
                ["head", fmt(p.q)]
                + [""] * (2 + J + 2)
                + [str(h.head + 1), fmt(h.cost), fmt(h.accuracy), fmt(h.ece), fmt(h.eefp), fmt(h.eef1)]
            )
    return rows


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_curve_csv(curve, path) -> None:
    write_csv(path, curve_header(len(curve.points[0].heads)), curve_rows(curve))


def write_metadata(path, metadata: dict) -> Path:
    meta_path = Path(str(path) + ".meta.json")
    meta_path.write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return meta_path


def read_curve_csv(path) -> dict:
    """Parse a curve CSV into ``{"points": [...], "heads": {q: [...]}}``."""
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            records = list(csv.DictReader(fh))
    except OSError as exc:
        raise InputError(f"cannot read curve file {path}: {exc}") from exc
    points = [r for r in records if r.get("row") == "curve"]
    if not points:
        raise InputError(f"curve file {path} has no curve rows")
    heads: dict[float, list] = {}
    for r in records:
        if r.get("row") == "head":
            heads.setdefault(float(r["q"]), []).append(
                {
                    "head": int(r["head"]),
                    "cost": float(r["head_cost"]),
                    "accuracy": float(r["acc_head"]),
                    "ece": _parse(r["ece"]),
                    "eefp": _parse(r["eefp"]),
                    "eef1": _parse(r["eef1"]),
                }
            )
    return {
        "points": [
            {"q": float(r["q"]), "mean_cost": float(r["mean_cost"]), "accuracy": float(r["accuracy"])}
            for r in points
        ],
        "heads": heads,
    }


class _Panel:
    def __init__(self, x0, y0, w, h, xlim, ylim, xticks=None, y_floor=None):
        self.x0, self.y0, self.w, self.h = x0, y0, w, h
        self.xlim, self.ylim = _pad(xlim), _pad(ylim)
        if y_floor is not None:
            self.ylim = (max(self.ylim[0], y_floor), self.ylim[1])
        self.xticks = xticks or _ticks(*self.xlim)

    def x(self, v):
        lo, hi = self.xlim
        return self.x0 + (v - lo) / (hi - lo) * self.w

    def y(self, v):
        lo, hi = self.ylim
        return self.y0 + self.h - (v - lo) / (hi - lo) * self.h


def _pad(lim):
    lo, hi = lim
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    span = hi - lo
    return lo - 0.05 * span, hi + 0.05 * span


def _ticks(lo, hi, n=5):
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _axes(panel, title, xlabel, ylabel):
    out = [
        f'<rect x="{panel.x0:.2f}" y="{panel.y0:.2f}" width="{panel.w:.2f}" height="{panel.h:.2f}" '
        'fill="none" stroke="#333"/>',
        f'<text x="{panel.x0 + panel.w / 2:.2f}" y="{panel.y0 - 12:.2f}" text-anchor="middle" '
        f'font-size="14">{escape(title)}</text>',
        f'<text x="{panel.x0 + panel.w / 2:.2f}" y="{panel.y0 + panel.h + 36:.2f}" '
        f'text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
        f'<text x="{panel.x0 - 46:.2f}" y="{panel.y0 + panel.h / 2:.2f}" text-anchor="middle" '
        f'font-size="12" transform="rotate(-90 {panel.x0 - 46:.2f} {panel.y0 + panel.h / 2:.2f})">'
        f"{escape(ylabel)}</text>",
    ]
    for v in panel.xticks:
        out.append(
            f'<text x="{panel.x(v):.2f}" y="{panel.y0 + panel.h + 16:.2f}" text-anchor="middle" '
            f'font-size="10">{v:.3g}</text>'
        )
    for v in _ticks(*panel.ylim):
        out.append(
            f'<text x="{panel.x0 - 6:.2f}" y="{panel.y(v) + 3:.2f}" text-anchor="end" '
            f'font-size="10">{v:.3g}</text>'
        )
    return out


def _polyline(panel, xs, ys, color, dash):
    pts = " ".join(f"{panel.x(a):.2f},{panel.y(b):.2f}" for a, b in zip(xs, ys))
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"{dash_attr}/>'


def _dots(panel, xs, ys, color):
    return [
        f'<circle cx="{panel.x(a):.2f}" cy="{panel.y(b):.2f}" r="3.5" fill="{color}"/>'
        for a, b in zip(xs, ys)
        if b is not None and math.isfinite(b)
    ]


def _legend(panel, labels):
    out = []
    for i, label in enumerate(labels):
        color, dash = PALETTE[i % len(PALETTE)], DASHES[i % len(DASHES)]
        y = panel.y0 + 14 + 16 * i
        x = panel.x0 + 8
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(
            f'<g class="legend-entry"><line x1="{x:.2f}" y1="{y:.2f}" x2="{x + 22:.2f}" y2="{y:.2f}" '
            f'stroke="{color}" stroke-width="2"{dash_attr}/>'
            f'<text x="{x + 28:.2f}" y="{y + 4:.2f}" font-size="11">{escape(label)}</text></g>'
        )
    return out


def render_svg(curves: list[dict], labels: list[str]) -> str:
    """Cost-accuracy curves with per-head dots, per-head ECE, per-head EEFP."""
    if len(curves) != len(labels):
        raise InputError(f"{len(curves)} curves but {len(labels)} labels")
    per_head = [c["heads"][min(c["heads"])] for c in curves]

    costs = [p["mean_cost"] for c in curves for p in c["points"]]
    costs += [h["cost"] for hs in per_head for h in hs]
    accs = [p["accuracy"] for c in curves for p in c["points"]]
    accs += [h["accuracy"] for hs in per_head for h in hs]
    num_heads = max(len(hs) for hs in per_head)
    eces = [h["ece"] for hs in per_head for h in hs if h["ece"] is not None]
    eefps = [h["eefp"] for hs in per_head for h in hs if h["eefp"] is not None]

    head_ticks = list(range(1, num_heads + 1))
    W, H = 1260, 420
    pw, ph, top = 330, 280, 60
    panels = [
        _Panel(80, top, pw, ph, (min(costs), max(costs)), (min(accs), max(accs))),
        _Panel(500, top, pw, ph, (1, num_heads), (0.0, max(eces + [0.0])), head_ticks, y_floor=0.0),
        _Panel(920, top, pw, ph, (1, num_heads), (min(eefps + [0.5]), max(eefps + [1.0])), head_ticks),
    ]
    body = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
    ]
    body += _axes(panels[0], "Cost vs accuracy", "mean cost per sample", "test accuracy")
    body += _axes(panels[1], "Per-head ECE", "head", "ECE")
    body += _axes(panels[2], "Per-head EEFP", "head", "EEFP")

    for i, (curve, heads) in enumerate(zip(curves, per_head)):
        color, dash = PALETTE[i % len(PALETTE)], DASHES[i % len(DASHES)]
        pts = curve["points"]
        body.append(f'<g class="curve" data-label="{escape(labels[i])}">')
        body.append(_polyline(panels[0], [p["mean_cost"] for p in pts], [p["accuracy"] for p in pts], color, dash))
        body += _dots(panels[0], [h["cost"] for h in heads], [h["accuracy"] for h in heads], color)
        hx = [h["head"] for h in heads]
        body.append(_polyline(panels[1], hx, [h["ece"] for h in heads], color, dash))
        body += _dots(panels[1], hx, [h["ece"] for h in heads], color)
        defined = [(h["head"], h["eefp"]) for h in heads if h["eefp"] is not None]
        if defined:
            body.append(_polyline(panels[2], *zip(*defined), color, dash))
            body += _dots(panels[2], *zip(*defined), color)
        body.append("</g>")
    for panel in panels:
        body += _legend(panel, labels)
    body.append("</svg>")
    return "\n".join(body) + "\n"
