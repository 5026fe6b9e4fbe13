"""Per-exit calibration measurement: reliability bins, ECE and NLL."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, LengthMismatch

DEFAULT_BINS = 15
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class ReliabilityBins:
    edges: np.ndarray  # [M + 1]
    counts: np.ndarray  # [M]
    confidence: np.ndarray  # [M], 0 for empty bins
    accuracy: np.ndarray  # [M], 0 for empty bins

    @property
    def num_bins(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def bin_index(conf, num_bins: int) -> np.ndarray:
    """Equal-width bins over [0, 1], right-closed; the first bin also takes 0."""
    edges = np.linspace(0.0, 1.0, num_bins + 1)
    idx = np.searchsorted(edges, conf, side="left") - 1
    return np.clip(idx, 0, num_bins - 1)


def reliability_bins(conf, correct, num_bins: int = DEFAULT_BINS) -> ReliabilityBins:
    conf = np.asarray(conf, dtype=np.float64)
    correct = np.asarray(correct, dtype=np.float64)
    if conf.shape != correct.shape:
        raise LengthMismatch(f"{conf.shape[0]} confidences vs {correct.shape[0]} outcomes")
    if num_bins < 1:
        raise ValueError("num_bins must be >= 1")
    idx = bin_index(conf, num_bins)
    counts = np.bincount(idx, minlength=num_bins)
    conf_sum = np.bincount(idx, weights=conf, minlength=num_bins)
    acc_sum = np.bincount(idx, weights=correct, minlength=num_bins)
    safe = np.maximum(counts, 1)
    return ReliabilityBins(
        edges=np.linspace(0.0, 1.0, num_bins + 1),
        counts=counts,
        confidence=np.where(counts > 0, conf_sum / safe, 0.0),
        accuracy=np.where(counts > 0, acc_sum / safe, 0.0),
    )


def ece(bins: ReliabilityBins) -> float:
    n = bins.total
    if n == 0:
        raise EmptyInput("ECE of an empty sample")
    gaps = np.abs(bins.accuracy - bins.confidence)
    return float(np.sum(bins.counts / n * gaps))


def expected_calibration_error(conf, correct, num_bins: int = DEFAULT_BINS) -> float:
    return ece(reliability_bins(conf, correct, num_bins))


def nll(probabilities, labels) -> float:
    probs = np.asarray(probabilities, dtype=np.float64)
    labels = np.asarray(labels)
    if probs.shape[0] != labels.shape[0]:
        raise LengthMismatch(f"{probs.shape[0]} prediction rows vs {labels.shape[0]} labels")
    p_true = probs[np.arange(len(labels)), labels]
    return float(np.mean(-np.log(np.maximum(p_true, PROB_FLOOR))))
