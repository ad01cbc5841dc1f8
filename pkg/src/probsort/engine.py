"""Sort sessions driven by rating updates, plus instrumented baselines.

A :class:`SortSession` owns the per-item ratings of one probabilistic
sort.  It never sees item values: callers fetch the next pair to compare,
obtain an outcome from wherever (a human, a noisy oracle), and feed it
back.  Classical sorts (bubble, merge, quick) are provided in an
instrumented form that exposes the intermediate arrangement after every
single comparison, so convergence can be measured on equal footing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator, Sequence

import numpy as np

from .rating import (
    ComparisonOutcome,
    EloParams,
    EloRating,
    GaussianRating,
    TrueSkillParams,
    elo_update,
    trueskill_update,
)
from .selection import (
    PairChoice,
    PairScoreCache,
    _partner_gap_arrays,
    _partner_wover_arrays,
)

__all__ = [
    "Algorithm",
    "ComparisonOutcome",
    "PairChoice",
    "SortSession",
    "StepTrace",
    "SessionFinishedError",
    "StalePairError",
    "new_session",
    "comparison_budget",
    "run_baseline",
    "baseline_steps",
]


class Algorithm(Enum):
    BUBBLE = "BUBBLE"
    MERGE = "MERGE"
    QUICK = "QUICK"
    ELOSORT_PARTNER = "ELOSORT_PARTNER"
    TSSORT_DRAW = "TSSORT_DRAW"
    TSSORT_WOVER = "TSSORT_WOVER"
    TSSORT_PARTNER_WOVER = "TSSORT_PARTNER_WOVER"

    @property
    def is_probabilistic(self) -> bool:
        return self not in (Algorithm.BUBBLE, Algorithm.MERGE, Algorithm.QUICK)

    @classmethod
    def from_name(cls, name: str) -> "Algorithm":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            valid = ", ".join(a.name.lower() for a in cls)
            raise ValueError(f"unknown algorithm {name!r}; choose one of: {valid}") from None


class SessionFinishedError(RuntimeError):
    """The comparison budget is exhausted; no further steps are allowed."""


class StalePairError(ValueError):
    """An outcome was submitted for a pair this session did not just issue."""


def comparison_budget(item_count: int, multiplier: float = 1.0) -> int:
    """Number of comparisons after which a list is deemed sufficiently sorted."""
    return math.ceil(multiplier * item_count * math.log2(item_count))


class SortSession:
    """Mutable state of one probabilistic sort; single-owner, not thread-safe."""

    def __init__(
        self,
        item_count: int,
        algorithm: Algorithm,
        params: TrueSkillParams | EloParams | None = None,
        budget_multiplier: float = 1.0,
    ):
        if item_count < 2:
            raise ValueError(f"need at least 2 items, got {item_count}")
        if not algorithm.is_probabilistic:
            raise ValueError(f"{algorithm.name} is a baseline, not a session algorithm")
        self.item_count = item_count
        self.algorithm = algorithm
        self.budget = comparison_budget(item_count, budget_multiplier)
        self.comparisons_done = 0
        self.history: list[tuple[PairChoice, ComparisonOutcome]] = []
        self._pending: PairChoice | None = None

        if algorithm is Algorithm.ELOSORT_PARTNER:
            self.params = params if params is not None else EloParams()
            if not isinstance(self.params, EloParams):
                raise TypeError("ELOSORT_PARTNER requires EloParams")
            self._scores = np.full(item_count, self.params.initial_score, dtype=np.float64)
            self._mu = self._sigma = None
            self._cache = None
        else:
            self.params = params if params is not None else TrueSkillParams()
            if not isinstance(self.params, TrueSkillParams):
                raise TypeError(f"{algorithm.name} requires TrueSkillParams")
            self._mu = np.full(item_count, self.params.mu0, dtype=np.float64)
            self._sigma = np.full(item_count, self.params.sigma0, dtype=np.float64)
            self._scores = None
            if algorithm is Algorithm.TSSORT_DRAW:
                self._cache = PairScoreCache("draw", self._mu, self._sigma, self.params.beta)
            elif algorithm is Algorithm.TSSORT_WOVER:
                self._cache = PairScoreCache("wover", self._mu, self._sigma, self.params.beta)
            else:
                self._cache = None

    @property
    def ratings(self) -> list[GaussianRating] | list[EloRating]:
        if self._scores is not None:
            return [EloRating(float(s)) for s in self._scores]
        return [
            GaussianRating(float(m), float(s))
            for m, s in zip(self._mu, self._sigma)
        ]

    def is_finished(self) -> bool:
        return self.comparisons_done >= self.budget

    def next_pair(self) -> PairChoice:
        """The pair the strategy wants compared next; pure and repeatable."""
        if self.is_finished():
            raise SessionFinishedError(
                f"budget of {self.budget} comparisons exhausted"
            )
        if self._pending is None:
            if self.algorithm is Algorithm.ELOSORT_PARTNER:
                self._pending = _partner_gap_arrays(self._scores)
            elif self.algorithm is Algorithm.TSSORT_PARTNER_WOVER:
                self._pending = _partner_wover_arrays(self._mu, self._sigma)
            else:
                self._pending = self._cache.best()
        return self._pending

    def apply_outcome(self, pair: PairChoice, outcome: ComparisonOutcome) -> None:
        """Update the two compared items' ratings and advance the session."""
        if self.is_finished():
            raise SessionFinishedError("cannot apply an outcome to a finished session")
        if pair != self.next_pair():
            raise StalePairError(
                f"pair ({pair.first_index}, {pair.second_index}) was not issued for this step"
            )
        i, j = pair.first_index, pair.second_index
        if self._scores is not None:
            ri, rj = elo_update(
                EloRating(float(self._scores[i])),
                EloRating(float(self._scores[j])),
                outcome,
                self.params,
            )
            self._scores[i] = ri.score
            self._scores[j] = rj.score
        else:
            ri, rj = trueskill_update(
                GaussianRating(float(self._mu[i]), float(self._sigma[i])),
                GaussianRating(float(self._mu[j]), float(self._sigma[j])),
                outcome,
                self.params,
            )
            self._mu[i] = ri.mu
            self._mu[j] = rj.mu
            self._sigma[i] = ri.sigma
            self._sigma[j] = rj.sigma
            if self._cache is not None:
                self._cache.update(i, j, self._mu, self._sigma)
        self.history.append((pair, outcome))
        self.comparisons_done += 1
        self._pending = None

    def _ranking_key(self) -> np.ndarray:
        """Per-item ranking score: conservative estimate, or the raw score."""
        if self._scores is not None:
            return self._scores
        return self._mu - 3.0 * self._sigma

    def scores(self) -> np.ndarray:
        return self._ranking_key().copy()

    def current_order(self) -> list[int]:
        """Item indices from highest to lowest ranking score, ties by index."""
        key = self._ranking_key()
        order = np.lexsort((np.arange(self.item_count), -key))
        return [int(i) for i in order]


def new_session(
    item_count: int,
    algorithm: Algorithm,
    params: TrueSkillParams | EloParams | None = None,
    budget_multiplier: float = 1.0,
) -> SortSession:
    """Cold-start session: every item begins at the model's initial rating."""
    return SortSession(item_count, algorithm, params, budget_multiplier)


# --- instrumented classical baselines -------------------------------------


@dataclass(frozen=True)
class StepTrace:
    step_index: int
    pair: PairChoice
    outcome: ComparisonOutcome
    order_after: list[int]


LessCallback = Callable[[int, int], bool]

# step tuple: (pair, outcome, arrangement, changed); `changed` lists the
# position swaps applied since the previous step, or None when the
# arrangement was rebuilt wholesale (merge)
_Step = tuple[PairChoice, ComparisonOutcome, Sequence[int], "tuple | None"]


def _bubble_steps(values: list[int], less: LessCallback) -> Iterator[_Step]:
    # full n-1 passes, no early exit: the comparison count is always n(n-1)/2
    n = len(values)
    for pass_end in range(n - 1, 0, -1):
        for k in range(1, pass_end + 1):
            x, y = values[k - 1], values[k]
            if less(x, y):
                yield PairChoice(x, y), ComparisonOutcome.SECOND_WINS, values, ()
            else:
                values[k - 1], values[k] = y, x
                yield PairChoice(x, y), ComparisonOutcome.FIRST_WINS, values, ((k - 1, k),)


def _quick_steps(values: list[int], less: LessCallback) -> Iterator[_Step]:
    # last-element pivot, Lomuto partition, left range processed first;
    # the comparison count is bounded whatever the comparator answers
    pending: list[tuple[int, int]] = []

    def flush() -> tuple:
        out = tuple(pending)
        pending.clear()
        return out

    stack = [(0, len(values) - 1)]
    while stack:
        lo, hi = stack.pop()
        if lo >= hi:
            continue
        pivot = values[hi]
        store = lo
        for k in range(lo, hi):
            x = values[k]
            if less(x, pivot):
                if k != store:
                    values[k], values[store] = values[store], values[k]
                    pending.append((store, k))
                store += 1
                yield PairChoice(x, pivot), ComparisonOutcome.SECOND_WINS, values, flush()
            else:
                yield PairChoice(x, pivot), ComparisonOutcome.FIRST_WINS, values, flush()
        if store != hi:
            values[store], values[hi] = values[hi], values[store]
            pending.append((store, hi))
        stack.append((store + 1, hi))
        stack.append((lo, store - 1))


def _merge_steps(values: list[int], less: LessCallback) -> Iterator[_Step]:
    # bottom-up merge; the reported arrangement concatenates, in original
    # block order, the output written so far with the unconsumed run
    # suffixes, so a top item can sit visibly "in the middle" until the
    # final merge reaches it
    n = len(values)
    src = list(values)
    dst = [0] * n
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                x, y = src[i], src[j]
                if less(y, x):
                    dst[k] = y
                    j += 1
                    outcome = ComparisonOutcome.FIRST_WINS
                else:
                    dst[k] = x
                    i += 1
                    outcome = ComparisonOutcome.SECOND_WINS
                k += 1
                snapshot = dst[:k] + src[i:mid] + src[j:hi] + src[hi:]
                yield PairChoice(x, y), outcome, snapshot, None
            while i < mid:
                dst[k] = src[i]
                i += 1
                k += 1
            while j < hi:
                dst[k] = src[j]
                j += 1
                k += 1
        src, dst = dst, src
        width *= 2
    values[:] = src


_BASELINE_STEPPERS = {
    Algorithm.BUBBLE: _bubble_steps,
    Algorithm.MERGE: _merge_steps,
    Algorithm.QUICK: _quick_steps,
}


def baseline_steps(
    algorithm: Algorithm, values: list[int], less: LessCallback
) -> Iterator[_Step]:
    """Step stream of a classical sort; mutates `values` toward the result.

    Rearrangements that follow the last comparison (quicksort's final
    pivot placement, merge's tail copies) are only visible in `values`
    after exhaustion, so drivers should re-read it for the final state.
    """
    if algorithm.is_probabilistic:
        raise ValueError(f"{algorithm.name} is not a baseline algorithm")
    return _BASELINE_STEPPERS[algorithm](values, less)


def run_baseline(
    algorithm: Algorithm,
    initial_list: Sequence[int],
    comparator: LessCallback,
) -> list[StepTrace]:
    """Run a classical sort, tracing the arrangement after every comparison.

    The comparator answers "is x smaller than y" and may be noisy; the
    greater item is considered the winner of the pair.  The last trace
    carries the algorithm's final output.
    """
    n = len(initial_list)
    if sorted(initial_list) != list(range(n)):
        raise ValueError("initial_list must be a permutation of 0..n-1")
    values = list(initial_list)
    traces: list[StepTrace] = []
    for pair, outcome, arrangement, _ in baseline_steps(algorithm, values, comparator):
        traces.append(
            StepTrace(
                step_index=len(traces) + 1,
                pair=pair,
                outcome=outcome,
                order_after=list(arrangement),
            )
        )
    if traces:
        last = traces[-1]
        traces[-1] = StepTrace(last.step_index, last.pair, last.outcome, list(values))
    return traces
