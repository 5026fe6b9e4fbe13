"""Multi-exit logit datasets and their on-disk format.

A dataset directory holds ``manifest.json`` plus two headerless binary files
per split::

    <split>_logits.f32   N*J*C little-endian float32, sample-major, then exit, then class
    <split>_labels.u32   N little-endian uint32

The manifest carries every dimension, so the binaries are raw payloads.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    EmptySplit,
    InvalidManifest,
    IoFailure,
    LabelOutOfRange,
    MissingFile,
    NonFiniteLogit,
    NonIncreasingCosts,
    ShapeMismatch,
)

SPLIT_NAMES = ("calib", "val", "test")
LOGITS_DTYPE = np.dtype("<f4")
LABELS_DTYPE = np.dtype("<u4")


@dataclass(frozen=True)
class Split:
    logits: np.ndarray  # [N, J, C] float32
    labels: np.ndarray  # [N] int64

    @property
    def num_samples(self) -> int:
        return int(self.logits.shape[0])


@dataclass(frozen=True)
class MultiExitDataset:
    num_classes: int
    num_exits: int
    exit_costs: tuple[float, ...]
    splits: dict[str, Split] = field(default_factory=dict)

    def __post_init__(self):
        validate_header(self.num_classes, self.num_exits, self.exit_costs)
        for name, split in self.splits.items():
            _validate_split(name, split, self.num_exits, self.num_classes)

    def split(self, name: str) -> Split:
        try:
            split = self.splits[name]
        except KeyError:
            raise EmptySplit(f"dataset has no {name!r} split") from None
        if split.num_samples == 0:
            raise EmptySplit(f"split {name!r} has no samples")
        return split


def validate_header(num_classes, num_exits, exit_costs, where="dataset"):
    if int(num_classes) < 2:
        raise InvalidManifest(f"{where}: num_classes must be >= 2, got {num_classes}")
    if int(num_exits) < 2:
        raise InvalidManifest(f"{where}: num_exits must be >= 2, got {num_exits}")
    if len(exit_costs) != num_exits:
        raise InvalidManifest(
            f"{where}: exit_costs has {len(exit_costs)} entries, expected {num_exits}"
        )
    costs = np.asarray(exit_costs, dtype=np.float64)
    if not np.all(np.isfinite(costs)) or np.any(costs < 0):
        raise InvalidManifest(f"{where}: exit_costs must be finite and non-negative")
    if np.any(np.diff(costs) <= 0):
        raise NonIncreasingCosts(
            f"{where}: exit_costs must be strictly increasing, got {list(exit_costs)}"
        )


def _validate_split(name, split, num_exits, num_classes, source=None):
    where = source or f"split {name!r}"
    logits, labels = split.logits, split.labels
    if logits.ndim != 3 or logits.shape[1:] != (num_exits, num_classes):
        raise ShapeMismatch(
            f"{where}: logits shape {logits.shape} != [N, {num_exits}, {num_classes}]"
        )
    if labels.shape != (logits.shape[0],):
        raise ShapeMismatch(f"{where}: {labels.shape[0]} labels for {logits.shape[0]} samples")
    if not np.all(np.isfinite(logits)):
        raise NonFiniteLogit(f"{where}: logits contain NaN or Inf")
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise LabelOutOfRange(f"{where}: labels must lie in [0, {num_classes})")


def _read_payload(path: Path, dtype, count: int) -> np.ndarray:
    if not path.is_file():
        raise MissingFile(f"missing file: {path}")
    expected = count * dtype.itemsize
    actual = path.stat().st_size
    if actual != expected:
        raise ShapeMismatch(f"{path}: {actual} bytes, expected {expected}")
    return np.fromfile(path, dtype=dtype, count=count)


def load_dataset(root) -> MultiExitDataset:
    root = Path(root)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise MissingFile(f"missing file: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        C = int(manifest["num_classes"])
        J = int(manifest["num_exits"])
        costs = tuple(float(c) for c in manifest["exit_costs"])
        split_specs = manifest["splits"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidManifest(f"{manifest_path}: {exc}") from exc
    validate_header(C, J, costs, where=str(manifest_path))

    splits = {}
    for name, desc in split_specs.items():
        if name not in SPLIT_NAMES:
            raise InvalidManifest(f"{manifest_path}: unknown split {name!r}")
        try:
            n = int(desc["num_samples"])
            logits_file, labels_file = desc["logits"], desc["labels"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidManifest(f"{manifest_path}: split {name!r}: {exc}") from exc
        logits = _read_payload(root / logits_file, LOGITS_DTYPE, n * J * C).reshape(n, J, C)
        labels = _read_payload(root / labels_file, LABELS_DTYPE, n).astype(np.int64)
        if not np.all(np.isfinite(logits)):
            raise NonFiniteLogit(f"{root / logits_file}: logits contain NaN or Inf")
        if labels.size and labels.max() >= C:
            raise LabelOutOfRange(
                f"{root / labels_file}: label {int(labels.max())} outside [0, {C})"
            )
        splits[name] = Split(logits=logits.astype(np.float32, copy=False), labels=labels)
    return MultiExitDataset(C, J, costs, splits)


def save_dataset(dataset: MultiExitDataset, root) -> None:
    root = Path(root)
    manifest = {
        "num_classes": dataset.num_classes,
        "num_exits": dataset.num_exits,
        "exit_costs": list(dataset.exit_costs),
        "splits": {},
    }
    try:
        root.mkdir(parents=True, exist_ok=True)
        for name, split in dataset.splits.items():
            logits_file, labels_file = f"{name}_logits.f32", f"{name}_labels.u32"
            np.ascontiguousarray(split.logits, dtype=LOGITS_DTYPE).tofile(root / logits_file)
            np.ascontiguousarray(split.labels, dtype=LABELS_DTYPE).tofile(root / labels_file)
            manifest["splits"][name] = {
                "num_samples": split.num_samples,
                "logits": logits_file,
                "labels": labels_file,
            }
        tmp = root / "manifest.json.tmp"
        tmp.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
        os.replace(tmp, root / "manifest.json")
    except OSError as exc:
        raise IoFailure(f"cannot write dataset to {root}: {exc}") from exc


def correctness(logits: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Boolean [N, J]: exit j's argmax equals the label (ties go to the lowest class)."""
    logits = np.asarray(logits)
    labels = np.asarray(labels)
    if logits.shape[0] != labels.shape[0]:
        raise ShapeMismatch(f"{logits.shape[0]} logit rows vs {labels.shape[0]} labels")
    return np.argmax(logits, axis=-1) == labels[:, None]
