"""Seeded synthetic multi-exit datasets.

Random numbers come from a SplitMix64 stream used in counter mode: the k-th
draw (k = 1, 2, ...) is ``mix(seed + k * 0x9E3779B97F4A7C15 mod 2**64)`` with
the standard SplitMix64 finalizer (shifts 30/27/31, multipliers
0xBF58476D1CE4E5B9 and 0x94D049BB133111EB). A draw becomes a uniform double
as ``(x >> 11) * 2**-53``. Normals use Box-Muller (cosine branch only), which
consumes two uniforms per normal.

Per split, in the order calib, val, test, the stream is consumed as:

1. ``N`` uniforms: sample difficulty ``d``.
2. ``N`` uniforms: label ``floor(u * C)``.
3. ``N*J`` uniforms (sample-major): correctness flips for heads 2..J.
4. ``N*J`` uniforms: which wrong class an incorrect head predicts.
5. ``N*J*C`` normals: logit noise.

Head ``j`` is right when ``d < t_j`` and, for deeper heads, the result is then
flipped with probability 0.05; ``t_j`` is set so that the expected accuracy
is ``head_skill[j]``. The predicted class gets ``max(other logits) +
s * (1 - d) + |noise|`` so it is always the argmax. Each head's logits are
then rescaled by their NLL-optimal temperature over all splits (so the
undistorted data is calibrated) and finally multiplied by
``distortion_temperature``, so that temperature is what refitting recovers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import MultiExitDataset, Split
from .errors import InvalidConfig
from .transforms import fit_temperature

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
FLIP_PROB = 0.05


class SplitMix64:
    def __init__(self, seed: int):
        self.seed = np.uint64(int(seed) & MASK64)
        self.counter = 0

    def next_u64(self, n: int) -> np.ndarray:
        k = np.arange(self.counter + 1, self.counter + 1 + n, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            z = self.seed + k * np.uint64(GAMMA)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
        return z ^ (z >> np.uint64(31))

    def uniform(self, n: int) -> np.ndarray:
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def normal(self, n: int) -> np.ndarray:
        u = self.uniform(2 * n).reshape(n, 2)
        radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))  # 1 - u in (0, 1]
        return radius * np.cos(2.0 * np.pi * u[:, 1])


def default_skill(num_exits: int, num_classes: int) -> tuple[float, ...]:
    lo = max(0.5, 1.0 / num_classes + 0.1)
    return tuple(float(s) for s in np.linspace(lo, 0.9, num_exits))


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 7
    samples: tuple[int, int, int] = (2000, 5000, 10000)  # calib, val, test
    num_exits: int = 5
    num_classes: int = 10
    head_skill: tuple[float, ...] | None = None
    signal_sharpness: float = 5.0
    distortion_temperature: float = 1.0
    exit_costs: tuple[float, ...] | None = field(default=None)

    def __post_init__(self):
        if self.num_exits < 2:
            raise InvalidConfig(f"need at least 2 exits (J >= 2), got {self.num_exits}")
        if self.num_classes < 2:
            raise InvalidConfig(f"need at least 2 classes, got {self.num_classes}")
        if len(self.samples) != 3 or any(int(n) < 1 for n in self.samples):
            raise InvalidConfig(f"need three positive split sizes, got {self.samples}")
        skill = self.skill
        if len(skill) != self.num_exits:
            raise InvalidConfig(f"{len(skill)} skills for {self.num_exits} exits")
        if any(b <= a for a, b in zip(skill, skill[1:])):
            raise InvalidConfig(f"skills must increase strictly, got {list(skill)}")
        if any(not (1.0 / self.num_classes < s < 1.0) for s in skill):
            raise InvalidConfig(f"skills must lie in (1/C, 1), got {list(skill)}")
        if not self.signal_sharpness > 0:
            raise InvalidConfig("signal sharpness must be positive")
        if not self.distortion_temperature > 0:
            raise InvalidConfig("distortion temperature must be positive")
        if self.exit_costs is not None and len(self.exit_costs) != self.num_exits:
            raise InvalidConfig(f"{len(self.exit_costs)} costs for {self.num_exits} exits")

    @property
    def skill(self) -> tuple[float, ...]:
        return self.head_skill or default_skill(self.num_exits, self.num_classes)

    @property
    def costs(self) -> tuple[float, ...]:
        return self.exit_costs or tuple(float(j + 1) for j in range(self.num_exits))


def _difficulty_cutoffs(skill) -> np.ndarray:
    cut = np.array(skill, dtype=np.float64)
    # Deeper heads flip with prob p: acc = p + (1 - 2p) * t.
    cut[1:] = (cut[1:] - FLIP_PROB) / (1.0 - 2.0 * FLIP_PROB)
    return np.clip(cut, 0.0, 1.0)


def _raw_split(rng: SplitMix64, n: int, cfg: SynthConfig):
    J, C = cfg.num_exits, cfg.num_classes
    d = rng.uniform(n)
    labels = np.minimum((rng.uniform(n) * C).astype(np.int64), C - 1)
    flips = rng.uniform(n * J).reshape(n, J) < FLIP_PROB
    wrong_pick = np.minimum((rng.uniform(n * J).reshape(n, J) * (C - 1)).astype(np.int64), C - 2)
    noise = rng.normal(n * J * C).reshape(n, J, C)

    right = d[:, None] < _difficulty_cutoffs(cfg.skill)[None, :]
    flips[:, 0] = False
    right ^= flips
    # Wrong classes are the C-1 labels other than the truth, in increasing order.
    wrong = wrong_pick + (wrong_pick >= labels[:, None])
    predicted = np.where(right, labels[:, None], wrong)

    onehot = np.arange(C)[None, None, :] == predicted[:, :, None]
    others_max = np.where(onehot, -np.inf, noise).max(axis=-1)
    boost = others_max + cfg.signal_sharpness * (1.0 - d)[:, None]
    boost = boost + np.abs(np.take_along_axis(noise, predicted[:, :, None], axis=-1)[..., 0])
    logits = np.where(onehot, boost[:, :, None], noise)
    return logits, labels


def generate(cfg: SynthConfig) -> MultiExitDataset:
    rng = SplitMix64(cfg.seed)
    raw = {name: _raw_split(rng, int(n), cfg) for name, n in zip(("calib", "val", "test"), cfg.samples)}

    pooled_logits = np.concatenate([r[0] for r in raw.values()])
    pooled_labels = np.concatenate([r[1] for r in raw.values()])
    base = np.array(
        [fit_temperature(pooled_logits[:, j, :], pooled_labels) for j in range(cfg.num_exits)]
    )
    scale = cfg.distortion_temperature / base[None, :, None]

    splits = {
        name: Split(logits=(logits * scale).astype(np.float32), labels=labels)
        for name, (logits, labels) in raw.items()
    }
    return MultiExitDataset(cfg.num_classes, cfg.num_exits, cfg.costs, splits)


def toy_dataset() -> MultiExitDataset:
    """Three samples, four classes, the same logits at two heads.

    Sample order A, B, C; labels are each row's argmax so every head is right.
    """
    rows = np.array(
        [
            [-0.7985, -0.9163, -2.3026, -2.9957],
            [-1.6094, -1.6094, -0.9163, -1.6094],
            [-1.2040, -0.9676, -1.3471, -2.8134],
        ],
        dtype=np.float32,
    )
    logits = np.stack([rows, rows], axis=1)
    labels = np.argmax(rows, axis=1).astype(np.int64)
    split = Split(logits=logits, labels=labels)
    return MultiExitDataset(4, 2, (1.0, 2.0), {"calib": split, "val": split, "test": split})
