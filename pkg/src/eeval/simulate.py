"""Early-exit inference simulation and cost-accuracy curves."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .budget import thresholds_for_grid
from .calibration import DEFAULT_BINS, expected_calibration_error
from .data import MultiExitDataset, correctness
from .errors import ShapeMismatch
from .failure import eef1, eefp_score
from .transforms import TransformChain, confidence_table


@dataclass(frozen=True)
class SimulationResult:
    accuracy: float
    mean_cost: float
    exit_histogram: np.ndarray  # [J]
    per_sample_exit: np.ndarray  # [N], zero-based head index

    @property
    def exit_fractions(self) -> np.ndarray:
        return self.exit_histogram / self.exit_histogram.sum()


@dataclass(frozen=True)
class HeadMetrics:
    head: int  # zero-based
    cost: float
    accuracy: float
    ece: float
    eefp: float | None
    eef1: float | None


@dataclass(frozen=True)
class CurvePoint:
    q: float
    thresholds: list
    result: SimulationResult
    heads: list  # HeadMetrics per exit
    eef1_mean: float | None
    eef1_defined: int


@dataclass(frozen=True)
class CostAccuracyCurve:
    points: list
    chain: TransformChain
    ece_bins: int

    def cost_accuracy(self) -> list[tuple[float, float]]:
        return [(p.result.mean_cost, p.result.accuracy) for p in self.points]


def exit_indices(conf, thresholds) -> np.ndarray:
    """First head whose confidence reaches its threshold; the last head otherwise."""
    conf = np.asarray(conf, dtype=np.float64)
    J = conf.shape[1]
    taus = np.asarray(list(thresholds), dtype=np.float64)
    if taus.shape != (J - 1,):
        raise ShapeMismatch(f"{taus.size} thresholds for {J} exits")
    fires = np.concatenate([conf[:, :-1] >= taus[None, :], np.ones((conf.shape[0], 1), bool)], axis=1)
    return np.argmax(fires, axis=1)


def simulate(conf, correct, thresholds, exit_costs) -> SimulationResult:
    conf = np.asarray(conf, dtype=np.float64)
    correct = np.asarray(correct, dtype=bool)
    costs = np.asarray(exit_costs, dtype=np.float64)
    if conf.shape != correct.shape or conf.shape[1] != costs.size:
        raise ShapeMismatch(
            f"confidence {conf.shape}, correctness {correct.shape}, {costs.size} costs"
        )
    exits = exit_indices(conf, thresholds)
    n = conf.shape[0]
    return SimulationResult(
        accuracy=float(correct[np.arange(n), exits].mean()),
        mean_cost=float(costs[exits].mean()),
        exit_histogram=np.bincount(exits, minlength=conf.shape[1]),
        per_sample_exit=exits,
    )


def worker_count() -> int:
    raw = os.environ.get("EEVAL_THREADS", "0").strip() or "0"
    n = int(raw)
    if n <= 0:
        return os.cpu_count() or 1
    return n


def build_curve(
    dataset: MultiExitDataset,
    chain: TransformChain,
    q_grid,
    ece_bins: int = DEFAULT_BINS,
) -> CostAccuracyCurve:
    """Thresholds on val per q, simulation and per-head metrics on test."""
    val = dataset.split("val")
    test = dataset.split("test")
    val_conf = confidence_table(val.logits, chain).conf
    test_conf = confidence_table(test.logits, chain).conf
    test_correct = correctness(test.logits, test.labels)
    costs = dataset.exit_costs

    head_acc = test_correct.mean(axis=0)
    head_ece = [
        expected_calibration_error(test_conf[:, j], test_correct[:, j], ece_bins)
        for j in range(dataset.num_exits)
    ]
    eefp = eefp_score(test_conf, test_correct) + [None]

    def point(q_taus):
        q, taus = q_taus
        result = simulate(test_conf, test_correct, taus, costs)
        f1 = eef1(test_conf, test_correct, taus)
        heads = [
            HeadMetrics(j, float(costs[j]), float(head_acc[j]), head_ece[j], eefp[j], f1.per_exit[j])
            for j in range(dataset.num_exits)
        ]
        return CurvePoint(q, taus, result, heads, f1.mean, f1.num_defined)

    sweep = thresholds_for_grid(val_conf, q_grid)
    workers = min(worker_count(), len(sweep))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(point, sweep))
    else:
        points = [point(s) for s in sweep]
    points.sort(key=lambda p: (p.result.mean_cost, p.q))
    return CostAccuracyCurve(points=points, chain=chain, ece_bins=ece_bins)


def weak_dominance_fraction(points, reference) -> float:
    """Share of ``points`` at or above ``reference`` interpolated at the same cost.

    Both arguments are cost-sorted sequences of ``(mean_cost, accuracy)``.
    Points outside the reference's cost range count as not dominating.
    """
    ref = np.asarray(reference, dtype=np.float64)
    wins = 0
    for cost, acc in points:
        if ref[0, 0] <= cost <= ref[-1, 0]:
            wins += acc >= np.interp(cost, ref[:, 0], ref[:, 1])
    return wins / len(points)
