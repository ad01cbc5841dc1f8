"""Convergence measurement: positional MSE and cross-run aggregation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = ["StepStats", "ConvergenceCurve", "position_mse", "pad_and_aggregate"]


@dataclass(frozen=True)
class StepStats:
    step_index: int
    mean_mse: float
    std_mse: float
    run_count: int


@dataclass(frozen=True)
class ConvergenceCurve:
    """Per-comparison MSE statistics of one algorithm cell."""

    algorithm_label: str
    list_length: int
    noise_level: float
    per_step: list[StepStats]

    def final_mean(self) -> float:
        return self.per_step[-1].mean_mse

    def mean_at(self, step: int) -> float:
        """Mean MSE after `step` comparisons (1-based)."""
        return self.per_step[step - 1].mean_mse

    def means(self) -> np.ndarray:
        return np.array([s.mean_mse for s in self.per_step])


def position_mse(order: Sequence[int]) -> float:
    """Mean squared displacement of a permutation from the identity.

    ``order[k]`` is read as the item value placed at position k, with item
    values 0..n-1 and ascending target order.
    """
    arr = np.asarray(order)
    n = len(arr)
    if n == 0:
        raise ValueError("order must be a non-empty permutation")
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValueError("order must contain integers")
    counts = np.bincount(arr, minlength=n) if arr.min() >= 0 else None
    if counts is None or len(counts) != n or not (counts == 1).all():
        raise ValueError("order is not a permutation of 0..n-1")
    diff = arr - np.arange(n)
    return float(diff @ diff) / n


def pad_and_aggregate(
    runs: Sequence[Sequence[float]],
    *,
    algorithm_label: str = "",
    list_length: int = 0,
    noise_level: float = 0.0,
) -> ConvergenceCurve:
    """Mean and population std of per-step MSE series across runs.

    Runs that finished early (baselines stop at different comparison
    counts) are right-padded with their final value, so every step
    aggregates over all runs.
    """
    if len(runs) == 0:
        raise ValueError("need at least one run to aggregate")
    if any(len(r) == 0 for r in runs):
        raise ValueError("runs must contain at least one step each")
    longest = max(len(r) for r in runs)
    table = np.empty((len(runs), longest), dtype=np.float64)
    for i, r in enumerate(runs):
        table[i, : len(r)] = r
        table[i, len(r) :] = r[-1]
    means = table.mean(axis=0)
    stds = table.std(axis=0)  # population std
    per_step = [
        StepStats(step_index=k + 1, mean_mse=float(means[k]), std_mse=float(stds[k]), run_count=len(runs))
        for k in range(longest)
    ]
    return ConvergenceCurve(
        algorithm_label=algorithm_label,
        list_length=list_length,
        noise_level=noise_level,
        per_step=per_step,
    )
