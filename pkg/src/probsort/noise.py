"""Ground-truth comparator with seeded, independent symmetric noise."""

from __future__ import annotations

import random
from typing import Sequence

from .rating import ComparisonOutcome

__all__ = ["NoisyComparator", "GENERATOR_NAME"]

# recorded in experiment manifests so runs can be replayed elsewhere
GENERATOR_NAME = "python-random-MT19937"


class NoisyComparator:
    """Answers pairwise comparisons from known values, flipping some.

    Each call consumes exactly one uniform deviate from the seeded
    generator; with probability ``noise_level`` the true outcome is
    inverted.  Noise is independent per call, so repeating the same query
    may disagree with itself.  Draws are never returned.
    """

    def __init__(self, true_values: Sequence[float], noise_level: float, rng_seed: int):
        values = list(true_values)
        if len(set(values)) != len(values):
            raise ValueError("true_values must be pairwise distinct")
        if not 0.0 <= noise_level <= 1.0:
            raise ValueError(f"noise_level must be in [0, 1], got {noise_level}")
        self._values = values
        self.noise_level = noise_level
        self.rng_seed = rng_seed
        self._rng = random.Random(rng_seed)
        self.draws_made = 0

    def __len__(self) -> int:
        return len(self._values)

    def compare(self, a: int, b: int) -> ComparisonOutcome:
        """Outcome for items a and b: FIRST_WINS means a holds the greater value."""
        if a == b:
            raise ValueError(f"cannot compare item {a} with itself")
        if not (0 <= a < len(self._values) and 0 <= b < len(self._values)):
            raise ValueError(f"item index out of range: ({a}, {b})")
        first_wins = self._values[a] > self._values[b]
        flip = self._rng.random() < self.noise_level
        self.draws_made += 1
        if flip:
            first_wins = not first_wins
        return ComparisonOutcome.FIRST_WINS if first_wins else ComparisonOutcome.SECOND_WINS

    def less(self, a: int, b: int) -> bool:
        """Noisy 'is a smaller than b', for driving classical sorts."""
        return self.compare(a, b) is ComparisonOutcome.SECOND_WINS
