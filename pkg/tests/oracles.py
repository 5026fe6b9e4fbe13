"""Slow, obviously-correct reference implementations used only by tests."""

import math


def auroc_pairs(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    total = 0.0
    for p in pos:
        for n in neg:
            total += 1.0 if p > n else 0.5 if p == n else 0.0
    return total / (len(pos) * len(neg))


def ece_loop(conf, correct, num_bins, edges):
    n = len(conf)
    total = 0.0
    for m in range(num_bins):
        lo, hi = edges[m], edges[m + 1]
        members = [
            i for i, c in enumerate(conf) if (lo < c <= hi) or (m == 0 and c == lo)
        ]
        if not members:
            continue
        acc = sum(correct[i] for i in members) / len(members)
        avg = sum(conf[i] for i in members) / len(members)
        total += len(members) / n * abs(acc - avg)
    return total


def softmax_scalar(row, temperature):
    exps = [math.exp(v / temperature) for v in row]
    s = sum(exps)
    return [e / s for e in exps]


def f1_naive(pred, target):
    tp = fp = fn = 0
    for p, t in zip(pred, target):
        if p and t:
            tp += 1
        elif p and not t:
            fp += 1
        elif t and not p:
            fn += 1
    if tp + fp + fn == 0:
        return 1.0
    return 2 * tp / (2 * tp + fp + fn)


def eefp_row(y_row):
    """Relabel one correctness row by reading the definition literally."""
    J = len(y_row)
    out = []
    for j in range(J - 1):
        deeper_all_wrong = all(not y_row[l] for l in range(j + 1, J))
        out.append(bool(y_row[j] or (not y_row[j] and deeper_all_wrong)))
    return out


def first_exit_scan(conf_row, taus):
    for j, tau in enumerate(taus):
        if conf_row[j] >= tau:
            return j
    return len(taus)
