"""Evaluation toolkit for early-exit classifiers working from precomputed per-exit logits."""

__version__ = "0.1.0"

from .budget import derive_thresholds, exit_shares, q_sweep
from .calibration import ece, expected_calibration_error, nll, reliability_bins
from .data import MultiExitDataset, Split, correctness, load_dataset, save_dataset
from .failure import auroc, eef1, eefp_labels, eefp_score
from .simulate import build_curve, simulate
from .synth import SynthConfig, generate
from .transforms import (
    ConfidenceTable,
    TransformChain,
    confidence_table,
    fit_temperatures,
    rank_preserving_transform,
    softmax,
)

__all__ = [
    "ConfidenceTable",
    "MultiExitDataset",
    "Split",
    "SynthConfig",
    "TransformChain",
    "auroc",
    "build_curve",
    "confidence_table",
    "correctness",
    "derive_thresholds",
    "ece",
    "eef1",
    "eefp_labels",
    "eefp_score",
    "exit_shares",
    "expected_calibration_error",
    "fit_temperatures",
    "generate",
    "load_dataset",
    "nll",
    "q_sweep",
    "rank_preserving_transform",
    "reliability_bins",
    "save_dataset",
    "simulate",
    "softmax",
]
