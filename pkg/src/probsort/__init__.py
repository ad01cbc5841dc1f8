"""Probabilistic, noise-resistant comparison sorting.

Ratings with uncertainty stand in for a total order; pair-selection
strategies decide which comparison is worth asking next; a simulation
harness benchmarks convergence against classical sorts under noisy
comparators; an HTTP service runs interactive human-driven sessions.
"""

from .engine import (
    Algorithm,
    ComparisonOutcome,
    PairChoice,
    SessionFinishedError,
    SortSession,
    StalePairError,
    StepTrace,
    comparison_budget,
    new_session,
    run_baseline,
)
from .harness import ExperimentConfig, run_cell, run_matrix
from .metrics import ConvergenceCurve, pad_and_aggregate, position_mse
from .noise import NoisyComparator
from .rating import (
    EloParams,
    EloRating,
    GaussianRating,
    TrueSkillParams,
    conservative_score,
    draw_probability,
    elo_expected_win,
    elo_update,
    std_normal_cdf,
    trueskill_update,
)
from .selection import (
    select_max_draw_probability,
    select_max_partner_overlap_elo,
    select_max_partner_weighted_overlap,
    select_max_weighted_overlap,
    weighted_overlap,
)

__version__ = "0.1.0"
