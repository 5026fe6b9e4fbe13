"""Budget levels: geometric exit shares and validation-derived thresholds."""

from __future__ import annotations

import math

import numpy as np

from .errors import EmptySplit, InvalidConfig, NonPositiveQ
from .transforms import confidence_table

EXIT_NOTHING = 1.0 + 1e-9

DEFAULT_Q_MIN = 2.0**-8
DEFAULT_Q_MAX = 2.0**8
DEFAULT_Q_POINTS = 33


def exit_shares(q: float, num_exits: int) -> np.ndarray:
    """shares[j] = q**j / sum_{l<J} q**l for j = 0..J-1."""
    if not (q > 0 and math.isfinite(q)):
        raise NonPositiveQ(f"q must be positive, got {q}")
    if num_exits < 2:
        raise InvalidConfig(f"need at least 2 exits, got {num_exits}")
    # Normalize in log space so q**j cannot overflow for large q or J.
    log_w = np.arange(num_exits) * math.log(q)
    w = np.exp(log_w - log_w.max())
    return w / w.sum()


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def derive_thresholds(val_conf, shares) -> list[float]:
    """Sequential quantile thresholds for heads 1..J-1.

    Head ``j`` takes the ``round(shares[j] * N)`` most confident samples among
    those still alive; survivors are the samples strictly below the threshold.
    """
    conf = np.asarray(val_conf, dtype=np.float64)
    n, J = conf.shape
    if n == 0:
        raise EmptySplit("validation split is empty")
    if len(shares) != J:
        raise InvalidConfig(f"{len(shares)} shares for {J} exits")
    alive = np.ones(n, dtype=bool)
    taus = []
    for j in range(J - 1):
        remaining = np.sort(conf[alive, j])[::-1]
        k = min(max(_round_half_up(shares[j] * n), 0), len(remaining))
        if k == 0:
            tau = EXIT_NOTHING
        elif k >= len(remaining):
            tau = 0.0
        else:
            tau = float(remaining[k - 1])
        taus.append(tau)
        alive &= conf[:, j] < tau
    return taus


def default_q_grid(q_min=DEFAULT_Q_MIN, q_max=DEFAULT_Q_MAX, points=DEFAULT_Q_POINTS) -> list[float]:
    if points < 1:
        raise InvalidConfig("q grid needs at least one point")
    if not (0 < q_min <= q_max):
        raise NonPositiveQ(f"need 0 < q_min <= q_max, got {q_min}, {q_max}")
    if points == 1:
        return [float(q_min)]
    return [float(q) for q in np.geomspace(q_min, q_max, points)]


def thresholds_for_grid(val_conf, q_grid) -> list[tuple[float, list[float]]]:
    """Thresholds for every q, derived on a validation confidence array [N, J]."""
    q_grid = list(q_grid)
    if not q_grid:
        raise InvalidConfig("empty q grid")
    J = np.asarray(val_conf).shape[1]
    return [(float(q), derive_thresholds(val_conf, exit_shares(q, J))) for q in sorted(q_grid)]


def q_sweep(dataset, chain, q_grid) -> list[tuple[float, list[float]]]:
    val = dataset.split("val")
    return thresholds_for_grid(confidence_table(val.logits, chain).conf, q_grid)
