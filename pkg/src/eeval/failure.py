"""Failure-prediction scores for multi-exit models.

The early-exit relabeling marks head ``j`` as a good place to stop for sample
``i`` when the head is right, or when no deeper head would be right either.
EEFP is the AUROC of head confidences against those labels; EEF1 scores the
actual exit decisions at fixed thresholds on the samples that reach each head.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLabels, LengthMismatch


def midranks(x) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    x = np.asarray(x)
    order = np.argsort(x, kind="mergesort")
    sorted_x = x[order]
    boundaries = np.flatnonzero(np.diff(sorted_x)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [len(x)]))
    avg = (starts + ends + 1) / 2.0
    ranks = np.empty(len(x), dtype=np.float64)
    ranks[order] = np.repeat(avg, ends - starts)
    return ranks


def auroc(scores, labels) -> float:
    """Mann-Whitney AUROC with half credit for ties."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    if scores.shape != labels.shape:
        raise LengthMismatch(f"{scores.shape[0]} scores vs {labels.shape[0]} labels")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels(f"need both classes, got {n_pos} positive / {n_neg} negative")
    rank_sum = midranks(scores)[labels].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def eefp_labels(correct, include_final: bool = False) -> np.ndarray:
    """ybar[i, j] = correct[i, j] or not any(correct[i, j+1:]).

    The final head's column is identically True and is dropped unless
    ``include_final`` is set.
    """
    y = np.asarray(correct, dtype=bool)
    # deeper_any[:, j] = any(y[:, j+1:])
    rev_any = np.logical_or.accumulate(y[:, ::-1], axis=1)[:, ::-1]
    deeper_any = np.zeros_like(y)
    deeper_any[:, :-1] = rev_any[:, 1:]
    ybar = y | ~deeper_any
    return ybar if include_final else ybar[:, :-1]


def eefp_score(conf, correct) -> list[float | None]:
    """Per non-final head EEFP; ``None`` where the relabeled targets are all one class."""
    conf = np.asarray(conf, dtype=np.float64)
    ybar = eefp_labels(correct)
    scores = []
    for j in range(ybar.shape[1]):
        try:
            scores.append(auroc(conf[:, j], ybar[:, j]))
        except DegenerateLabels:
            scores.append(None)
    return scores


def f1_score(pred, target) -> float:
    """Binary F1 = 2TP / (2TP + FP + FN); 1.0 when both sides are empty."""
    pred = np.asarray(pred, dtype=bool)
    target = np.asarray(target, dtype=bool)
    tp = int(np.sum(pred & target))
    fp = int(np.sum(pred & ~target))
    fn = int(np.sum(~pred & target))
    denom = 2 * tp + fp + fn
    return 1.0 if denom == 0 else 2 * tp / denom


@dataclass(frozen=True)
class EEF1Result:
    per_exit: list  # float | None per head
    mean: float | None
    num_defined: int


def eef1(conf, correct, thresholds) -> EEF1Result:
    conf = np.asarray(conf, dtype=np.float64)
    taus = list(thresholds) + [0.0]
    J = conf.shape[1]
    if len(taus) != J:
        raise LengthMismatch(f"{len(taus) - 1} thresholds for {J} exits")
    ybar = eefp_labels(correct, include_final=True)
    alive = np.ones(conf.shape[0], dtype=bool)
    per_exit = []
    for j in range(J):
        exits = conf[:, j] >= taus[j]
        if alive.any():
            per_exit.append(f1_score(exits[alive], ybar[alive, j]))
        else:
            per_exit.append(None)
        alive &= ~exits
    defined = [s for s in per_exit if s is not None]
    mean = sum(defined) / len(defined) if defined else None
    return EEF1Result(per_exit=per_exit, mean=mean, num_defined=len(defined))
