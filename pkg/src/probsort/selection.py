"""Strategies for picking the next pair of items to compare.

Two families:

* full-pair strategies that score every unordered pair (maximum draw
  probability, maximum weighted overlap), and
* partner strategies that only score neighbours in the current
  score-sorted order, trading a little selection quality for O(n) work.

All selectors are deterministic: score ties are broken by the smallest
(first_index, second_index) pair, or by the earliest position in sorted
order for the partner variants.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .rating import EloRating, GaussianRating

__all__ = [
    "PairChoice",
    "weighted_overlap",
    "select_max_draw_probability",
    "select_max_weighted_overlap",
    "select_max_partner_weighted_overlap",
    "select_max_partner_overlap_elo",
]


@dataclass(frozen=True)
class PairChoice:
    first_index: int
    second_index: int

    def __post_init__(self) -> None:
        if self.first_index == self.second_index:
            raise ValueError("pair must consist of two distinct items")


def weighted_overlap(ri: GaussianRating, rj: GaussianRating) -> float:
    """Overlap of the two 2-sigma intervals, weighted by the wider one.

    The overlapped length is divided by the length covered by either
    interval, then multiplied by the longer interval's width.  Disjoint
    intervals give negative values.
    """
    a, b = ri.mu - 2.0 * ri.sigma, ri.mu + 2.0 * ri.sigma
    c, d = rj.mu - 2.0 * rj.sigma, rj.mu + 2.0 * rj.sigma
    return (min(b, d) - max(a, c)) / (max(b, d) - min(a, c)) * max(b - a, d - c)


# --- array kernels -------------------------------------------------------
#
# The same kernels back both the stateless selectors below and the
# incremental cache used by sort sessions, so both paths produce
# bit-identical scores.

def _wover_kernel(mu_x, sigma_x, mu_y, sigma_y):
    a, b = mu_x - 2.0 * sigma_x, mu_x + 2.0 * sigma_x
    c, d = mu_y - 2.0 * sigma_y, mu_y + 2.0 * sigma_y
    return (
        (np.minimum(b, d) - np.maximum(a, c))
        / (np.maximum(b, d) - np.minimum(a, c))
        * np.maximum(b - a, d - c)
    )


def _drawscore_kernel(mu_x, var_x, mu_y, var_y, two_beta_sq):
    # log of the squared draw probability, up to a constant: a monotone
    # stand-in that avoids sqrt/exp in the hot path.  The sum order keeps
    # scores bit-identical under argument swap.
    denom = two_beta_sq + (var_x + var_y)
    diff = mu_x - mu_y
    return -np.log(denom) - diff * diff / denom


def _as_arrays(ratings: Sequence[GaussianRating]) -> tuple[np.ndarray, np.ndarray]:
    mu = np.array([r.mu for r in ratings], dtype=np.float64)
    sigma = np.array([r.sigma for r in ratings], dtype=np.float64)
    return mu, sigma


def _require_pairable(n: int) -> None:
    if n < 2:
        raise ValueError(f"need at least 2 items to select a pair, got {n}")


def _full_pair_argmax(scores: np.ndarray, iu: np.ndarray, ju: np.ndarray) -> PairChoice:
    # triu enumeration is lexicographic, argmax takes the first maximum
    k = int(np.argmax(scores))
    return PairChoice(int(iu[k]), int(ju[k]))


def select_max_draw_probability(
    ratings: Sequence[GaussianRating], beta: float
) -> PairChoice:
    """Pair with the highest draw probability among all unordered pairs."""
    _require_pairable(len(ratings))
    mu, sigma = _as_arrays(ratings)
    iu, ju = np.triu_indices(len(ratings), k=1)
    var = sigma * sigma
    scores = _drawscore_kernel(mu[iu], var[iu], mu[ju], var[ju], 2.0 * beta * beta)
    return _full_pair_argmax(scores, iu, ju)


def select_max_weighted_overlap(ratings: Sequence[GaussianRating]) -> PairChoice:
    """Pair with the highest weighted 2-sigma overlap among all pairs."""
    _require_pairable(len(ratings))
    mu, sigma = _as_arrays(ratings)
    iu, ju = np.triu_indices(len(ratings), k=1)
    scores = _wover_kernel(mu[iu], sigma[iu], mu[ju], sigma[ju])
    return _full_pair_argmax(scores, iu, ju)


def _rank_order_desc(score: np.ndarray) -> np.ndarray:
    """Indices sorted by score descending, ties by original index."""
    return np.lexsort((np.arange(len(score)), -score))


def _partner_wover_arrays(mu: np.ndarray, sigma: np.ndarray) -> PairChoice:
    order = _rank_order_desc(mu - 3.0 * sigma)
    lo, hi = order[:-1], order[1:]
    scores = _wover_kernel(mu[lo], sigma[lo], mu[hi], sigma[hi])
    k = int(np.argmax(scores))
    return PairChoice(int(order[k]), int(order[k + 1]))


def _partner_gap_arrays(scores: np.ndarray) -> PairChoice:
    order = _rank_order_desc(scores)
    ranked = scores[order]
    gaps = ranked[:-1] - ranked[1:]
    k = int(np.argmin(gaps))
    return PairChoice(int(order[k]), int(order[k + 1]))


def select_max_partner_weighted_overlap(
    ratings: Sequence[GaussianRating],
) -> PairChoice:
    """Best weighted overlap among neighbours in conservative-score order.

    Items are ranked by mu - 3 sigma (descending, ties by index); only the
    n - 1 successive pairs of that ranking are scored, and ties go to the
    earlier position in the ranking.
    """
    _require_pairable(len(ratings))
    mu, sigma = _as_arrays(ratings)
    return _partner_wover_arrays(mu, sigma)


def select_max_partner_overlap_elo(scores: Sequence[EloRating]) -> PairChoice:
    """Closest pair of neighbours in score order.

    With equal-width performance intervals the most-overlapping successive
    pair is simply the one with the smallest score gap.
    """
    _require_pairable(len(scores))
    s = np.array([r.score for r in scores], dtype=np.float64)
    return _partner_gap_arrays(s)


class PairScoreCache:
    """Incremental argmax over all unordered pair scores.

    Sessions using a full-pair strategy touch only two items per update,
    so the full score matrix is kept and only the affected rows and
    columns are rescored.  Per-row maxima track the smallest column
    attaining them, which preserves the exact lexicographic tie-break of
    the stateless selectors.
    """

    def __init__(self, kind: str, mu: np.ndarray, sigma: np.ndarray, beta: float):
        if kind not in ("draw", "wover"):
            raise ValueError(f"unknown pair score kind: {kind}")
        self._kind = kind
        self._two_beta_sq = 2.0 * beta * beta
        n = len(mu)
        self._n = n
        self._matrix = np.empty((n, n), dtype=np.float64)
        self._rowmax = np.empty(n - 1, dtype=np.float64)
        self._rowarg = np.empty(n - 1, dtype=np.intp)
        self._rebuild(mu, sigma)

    def _score_against_all(self, i: int, mu: np.ndarray, sigma: np.ndarray) -> np.ndarray:
        if self._kind == "wover":
            return _wover_kernel(mu[i], sigma[i], mu, sigma)
        var = sigma * sigma
        return _drawscore_kernel(mu[i], var[i], mu, var, self._two_beta_sq)

    def _rebuild(self, mu: np.ndarray, sigma: np.ndarray) -> None:
        m = self._matrix
        for i in range(self._n):
            m[i, :] = self._score_against_all(i, mu, sigma)
        np.fill_diagonal(m, -np.inf)
        for k in range(self._n - 1):
            self._recompute_row(k)

    def _recompute_row(self, k: int) -> None:
        row = self._matrix[k, k + 1 :]
        j = int(np.argmax(row))
        self._rowmax[k] = row[j]
        self._rowarg[k] = k + 1 + j

    def update(self, u: int, v: int, mu: np.ndarray, sigma: np.ndarray) -> None:
        """Rescore after the ratings of items u and v changed."""
        m = self._matrix
        row_u = self._score_against_all(u, mu, sigma)
        row_v = self._score_against_all(v, mu, sigma)
        m[u, :] = row_u
        m[:, u] = row_u
        m[v, :] = row_v
        m[:, v] = row_v
        m[u, u] = -np.inf
        m[v, v] = -np.inf

        nrows = self._n - 1
        rowmax = self._rowmax
        args = self._rowarg

        # rows whose tracked maximum sat in a rescored column: keep it if it
        # did not drop, otherwise rescan the row
        stale = np.nonzero((args == u) | (args == v))[0]
        for k in stale:
            if k == u or k == v:
                continue
            new = m[k, args[k]]
            if new >= rowmax[k]:
                rowmax[k] = new
            else:
                self._recompute_row(int(k))
        if u < nrows:
            self._recompute_row(u)
        if v < nrows:
            self._recompute_row(v)

        # rescored columns may now beat (or tie at a smaller index) the
        # tracked maximum of any earlier row; visit columns in index order
        # so exact ties keep lexicographic winners
        for c in sorted((u, v)):
            lim = min(c, nrows)
            if lim <= 0:
                continue
            vals = m[:lim, c]
            upd = (vals > rowmax[:lim]) | ((vals == rowmax[:lim]) & (c < args[:lim]))
            if upd.any():
                idx = np.nonzero(upd)[0]
                rowmax[idx] = vals[idx]
                args[idx] = c

    def best(self) -> PairChoice:
        k = int(np.argmax(self._rowmax))
        return PairChoice(k, int(self._rowarg[k]))
