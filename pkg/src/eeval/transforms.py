"""Softmax confidences, temperature (de)calibration and the rank-preserving map."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, EmptySplit, InvalidConfig, NonFiniteInput

EPSILON = 0.05
DOMAIN_TOL = 1e-9

T_MIN, T_MAX = 0.05, 20.0
GRID_POINTS = 64
LOG_T_TOL = 1e-4


@dataclass(frozen=True)
class TransformChain:
    """Confidence recipe: fitted per-head temperatures, a global multiplier, optional alpha."""

    base_temperatures: tuple[float, ...] | None = None
    temperature_multiplier: float = 1.0
    alpha: float | None = None
    epsilon: float = field(default=EPSILON, init=False)

    def __post_init__(self):
        if self.base_temperatures is not None:
            temps = tuple(float(t) for t in self.base_temperatures)
            if not all(math.isfinite(t) and t > 0 for t in temps):
                raise InvalidConfig(f"temperatures must be positive, got {temps}")
            object.__setattr__(self, "base_temperatures", temps)
        if not (math.isfinite(self.temperature_multiplier) and self.temperature_multiplier > 0):
            raise InvalidConfig(
                f"temperature multiplier must be positive, got {self.temperature_multiplier}"
            )
        if self.alpha is not None and not (math.isfinite(self.alpha) and self.alpha > 0):
            raise InvalidConfig(f"alpha must be positive, got {self.alpha}")

    def temperatures(self, num_exits: int) -> np.ndarray:
        base = self.base_temperatures or (1.0,) * num_exits
        if len(base) != num_exits:
            raise InvalidConfig(f"{len(base)} temperatures for {num_exits} exits")
        return np.asarray(base, dtype=np.float64) * self.temperature_multiplier

    def describe(self) -> dict:
        return {
            "base_temperatures": list(self.base_temperatures) if self.base_temperatures else None,
            "temperature_multiplier": self.temperature_multiplier,
            "alpha": self.alpha,
            "epsilon": self.epsilon,
        }


@dataclass(frozen=True)
class ConfidenceTable:
    conf: np.ndarray  # [N, J] float64 in [1/C, 1]
    pred: np.ndarray  # [N, J] argmax class, untouched by alpha
    num_classes: int
    chain: TransformChain


def _check_finite(x):
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput("input contains NaN or Inf")


def softmax(logits, temperature=1.0) -> np.ndarray:
    """Max-subtracted softmax over the last axis of ``logits / temperature``."""
    z = np.asarray(logits, dtype=np.float64)
    t = np.asarray(temperature, dtype=np.float64)
    _check_finite(z)
    _check_finite(t)
    if np.any(t <= 0):
        raise DomainError("temperature must be positive")
    z = z / t
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def max_softmax(logits, temperature=1.0) -> np.ndarray:
    """Top softmax probability, computed as 1 / sum(exp((z - z_max) / T))."""
    z = np.asarray(logits, dtype=np.float64)
    t = np.asarray(temperature, dtype=np.float64)
    _check_finite(z)
    z = (z - z.max(axis=-1, keepdims=True)) / t
    return 1.0 / np.exp(z).sum(axis=-1)


def rank_preserving_transform(c, alpha: float, num_classes: int):
    """Blend of identity and the power map anchored at 1/C and 1.

    Returns ``eps*c + (1-eps)*(1/C + (1-1/C) * ((c - 1/C) / (1 - 1/C))**alpha)``
    with eps = 0.05; strictly increasing, with 1/C and 1 as fixed points.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    scalar = np.ndim(c) == 0
    c = np.asarray(c, dtype=np.float64)
    floor = 1.0 / num_classes
    if np.any(c < floor - DOMAIN_TOL) or np.any(c > 1.0 + DOMAIN_TOL) or np.any(np.isnan(c)):
        raise DomainError(f"confidence outside [1/{num_classes}, 1]")
    c = np.clip(c, floor, 1.0)
    span = 1.0 - floor
    power = floor + span * ((c - floor) / span) ** alpha
    out = EPSILON * c + (1.0 - EPSILON) * power
    out = np.where(c == floor, floor, np.where(c == 1.0, 1.0, out))
    if alpha == 1.0:
        out = c.copy()
    return float(out) if scalar else out


def confidence_table(logits, chain: TransformChain) -> ConfidenceTable:
    logits = np.asarray(logits)
    _check_finite(logits)
    _, J, C = logits.shape
    temps = chain.temperatures(J)
    conf = max_softmax(logits, temps[None, :, None])
    conf = np.clip(conf, 1.0 / C, 1.0)
    if chain.alpha is not None:
        conf = rank_preserving_transform(conf, chain.alpha, C)
    return ConfidenceTable(conf=conf, pred=np.argmax(logits, axis=-1), num_classes=C, chain=chain)


def mean_nll(logits, labels, temperature: float) -> float:
    """Mean negative log-likelihood of ``labels`` under softmax(logits / T); logits [N, C]."""
    z = np.asarray(logits, dtype=np.float64) / temperature
    zmax = z.max(axis=-1)
    lse = zmax + np.log(np.exp(z - zmax[:, None]).sum(axis=-1))
    return float(np.mean(lse - z[np.arange(z.shape[0]), labels]))


def _golden_section(f, lo, hi, tol):
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, f(x)


def fit_temperature(logits, labels) -> float:
    """NLL-optimal temperature for one head; logits [N, C].

    Coarse log-spaced grid over [0.05, 20] (T = 1 included), then golden-section
    refinement in log T between the grid neighbours of the best point.
    """
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels)
    if logits.shape[0] == 0:
        raise EmptySplit("cannot fit a temperature on an empty split")
    grid = np.linspace(math.log(T_MIN), math.log(T_MAX), GRID_POINTS)
    grid = np.unique(np.append(grid, 0.0))

    def objective(log_t):
        return mean_nll(logits, labels, math.exp(log_t))

    values = [objective(g) for g in grid]
    best = int(np.argmin(values))
    best_log_t, best_val = float(grid[best]), values[best]
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]
    log_t, val = _golden_section(objective, float(lo), float(hi), LOG_T_TOL)
    if val < best_val:
        best_log_t = log_t
    return math.exp(best_log_t)


def fit_temperatures(logits, labels) -> list[float]:
    """One independently fitted temperature per exit; logits [N, J, C]."""
    logits = np.asarray(logits)
    if logits.shape[0] == 0:
        raise EmptySplit("calibration split is empty")
    return [fit_temperature(logits[:, j, :], labels) for j in range(logits.shape[1])]


def save_temperatures(temps, path) -> None:
    Path(path).write_text(json.dumps([float(t) for t in temps]) + "\n", encoding="utf-8")


def load_temperatures(path) -> tuple[float, ...]:
    try:
        temps = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise InvalidConfig(f"cannot read temperatures from {path}: {exc}") from exc
    if not isinstance(temps, list) or not all(isinstance(t, (int, float)) for t in temps):
        raise InvalidConfig(f"{path}: expected a JSON array of numbers")
    return tuple(float(t) for t in temps)
