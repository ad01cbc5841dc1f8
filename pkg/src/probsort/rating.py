"""Rating models used to sort under noisy comparisons.

Two models are provided:

* a Gaussian-belief model keeping a mean and an uncertainty per item,
  updated with the classic two-player skill-update equations, and
* a scalar score model (Elo style) updated proportionally to the
  surprise of each outcome.

All functions here are pure; rating values are immutable and can be
shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from scipy.special import erfcx

__all__ = [
    "ComparisonOutcome",
    "GaussianRating",
    "EloRating",
    "TrueSkillParams",
    "EloParams",
    "std_normal_cdf",
    "std_normal_pdf",
    "elo_expected_win",
    "elo_update",
    "trueskill_update",
    "conservative_score",
    "draw_probability",
]

_SQRT2 = math.sqrt(2.0)
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class ComparisonOutcome(Enum):
    """Result of a single pairwise comparison, seen from the first item."""

    FIRST_WINS = 1
    SECOND_WINS = -1
    DRAW = 0


@dataclass(frozen=True)
class GaussianRating:
    """Gaussian belief over an item's latent strength.

    Attributes:
        mu: mean of the belief (dimensionless score units).
        sigma: standard deviation of the belief; strictly positive.
    """

    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma)):
            raise ValueError(f"rating must be finite, got mu={self.mu}, sigma={self.sigma}")
        if self.sigma <= 0.0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")


@dataclass(frozen=True)
class EloRating:
    """Scalar rating score of an item."""

    score: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.score):
            raise ValueError(f"score must be finite, got {self.score}")


@dataclass(frozen=True)
class TrueSkillParams:
    """Parameters of the Gaussian-belief model.

    Attributes:
        beta: performance standard deviation shared by all items.
        mu0: initial belief mean for a fresh item.
        sigma0: initial belief standard deviation.
        epsilon: draw margin; 0 means draws carry the point-equality limit
            update (simulated comparisons never draw, interactive ones may).
    """

    beta: float = 25.0 / 6.0
    mu0: float = 25.0
    sigma0: float = 25.0 / 3.0
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        if self.beta <= 0.0 or self.sigma0 <= 0.0:
            raise ValueError("beta and sigma0 must be > 0")
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be >= 0")
        if not all(map(math.isfinite, (self.beta, self.mu0, self.sigma0, self.epsilon))):
            raise ValueError("parameters must be finite")


@dataclass(frozen=True)
class EloParams:
    """Parameters of the scalar score model.

    The update step scales with ``k_factor``; ``beta`` is the assumed
    performance standard deviation, so an expected-win probability of
    about 0.84 corresponds to a score gap of sqrt(2) * beta.
    """

    k_factor: float = 32.0
    beta: float = 200.0 / math.sqrt(2.0)
    initial_score: float = 1000.0

    def __post_init__(self) -> None:
        if self.k_factor <= 0.0 or self.beta <= 0.0:
            raise ValueError("k_factor and beta must be > 0")
        if not all(map(math.isfinite, (self.k_factor, self.beta, self.initial_score))):
            raise ValueError("parameters must be finite")


def std_normal_cdf(x: float) -> float:
    """Cumulative distribution function of the standard normal."""
    return 0.5 * math.erfc(-x / _SQRT2)


def std_normal_pdf(x: float) -> float:
    """Density of the standard normal."""
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def elo_expected_win(si: EloRating, sj: EloRating, params: EloParams) -> float:
    """Probability that the first item outperforms the second.

    Both items' observable performances are modeled as normal with the
    same variance beta^2 around their scores, so the win probability is
    Phi((si - sj) / sqrt(2 beta^2)).
    """
    return std_normal_cdf((si.score - sj.score) / (_SQRT2 * params.beta))


def elo_update(
    si: EloRating,
    sj: EloRating,
    outcome: ComparisonOutcome,
    params: EloParams,
) -> tuple[EloRating, EloRating]:
    """Apply one outcome to a pair of scalar ratings.

    The shared delta is K * ((y + 1) / 2 - expected_win) with y = 1, 0, -1
    for a first-item win, draw, and loss; it is added to the first score
    and subtracted from the second, conserving the score sum.
    """
    y = float(outcome.value)
    delta = params.k_factor * ((y + 1.0) / 2.0 - elo_expected_win(si, sj, params))
    return EloRating(si.score + delta), EloRating(sj.score - delta)


def _v_win(x: float) -> float:
    """Mean-shift factor N(x)/Phi(x), stable for arbitrarily negative x.

    The direct ratio breaks down once Phi underflows; below -5 a scaled
    complementary error function keeps full precision (for x -> -inf the
    value approaches -x).
    """
    if x > -5.0:
        return std_normal_pdf(x) / std_normal_cdf(x)
    return _SQRT_2_OVER_PI / float(erfcx(-x / _SQRT2))


def _vw_draw(t: float, eps: float) -> tuple[float, float]:
    """Mean and variance factors for a draw observation.

    Uses the difference-of-densities over difference-of-CDFs forms on the
    interval [-eps - t, eps - t].  When that denominator underflows
    (notably the eps = 0 margin), the analytic limits v = -t and w = 1
    apply: the posterior is the model conditioned on exactly equal
    performances.
    """
    a = eps - t
    b = -eps - t
    denom = std_normal_cdf(a) - std_normal_cdf(b)
    if denom <= 0.0:
        return -t, 1.0
    v = (std_normal_pdf(b) - std_normal_pdf(a)) / denom
    w = v * v + (a * std_normal_pdf(a) - b * std_normal_pdf(b)) / denom
    return v, w


def trueskill_update(
    ri: GaussianRating,
    rj: GaussianRating,
    outcome: ComparisonOutcome,
    params: TrueSkillParams,
) -> tuple[GaussianRating, GaussianRating]:
    """Apply one outcome to a pair of Gaussian ratings.

    The update matches the exact posterior moments of the two-item
    performance model: each item's performance is normal around its
    latent strength with variance beta^2, and the observation is either
    "first performance exceeds second by more than epsilon" (a win) or
    "within epsilon" (a draw).

    A win never lowers the winner's mean or raises the loser's; both
    uncertainties strictly shrink and stay positive.
    """
    var_i = ri.sigma * ri.sigma
    var_j = rj.sigma * rj.sigma
    c_sq = 2.0 * params.beta * params.beta + (var_i + var_j)
    c = math.sqrt(c_sq)
    eps = params.epsilon / c

    if outcome is ComparisonOutcome.DRAW:
        t = (ri.mu - rj.mu) / c
        v, w = _vw_draw(t, eps)
        mu_i = ri.mu + var_i / c * v
        mu_j = rj.mu - var_j / c * v
    else:
        if outcome is ComparisonOutcome.FIRST_WINS:
            winner, loser = ri, rj
        else:
            winner, loser = rj, ri
        x = (winner.mu - loser.mu) / c - eps
        v = _v_win(x)
        w = v * (v + x)
        mu_w = winner.mu + (winner.sigma * winner.sigma) / c * v
        mu_l = loser.mu - (loser.sigma * loser.sigma) / c * v
        if outcome is ComparisonOutcome.FIRST_WINS:
            mu_i, mu_j = mu_w, mu_l
        else:
            mu_i, mu_j = mu_l, mu_w

    sigma_i = math.sqrt(var_i * (1.0 - var_i / c_sq * w))
    sigma_j = math.sqrt(var_j * (1.0 - var_j / c_sq * w))
    return GaussianRating(mu_i, sigma_i), GaussianRating(mu_j, sigma_j)


def conservative_score(r: GaussianRating) -> float:
    """Pessimistic point estimate mu - 3 sigma used for ranking."""
    return r.mu - 3.0 * r.sigma


def draw_probability(ri: GaussianRating, rj: GaussianRating, beta: float) -> float:
    """Probability that two rated items would tie, given shared beta.

    Symmetric in its arguments, in (0, 1], and maximal when the means
    coincide.
    """
    if beta <= 0.0:
        raise ValueError("beta must be > 0")
    # sum order keeps the result bit-identical under argument swap
    denom = 2.0 * beta * beta + (ri.sigma * ri.sigma + rj.sigma * rj.sigma)
    diff = ri.mu - rj.mu
    return math.sqrt(2.0 * beta * beta / denom) * math.exp(-diff * diff / (2.0 * denom))
