"""Shared test helpers: an independent numeric oracle for rating updates."""

from __future__ import annotations

import math

import numpy as np
from hypothesis import settings
from scipy.special import erfc, roots_hermite

settings.register_profile("default", deadline=None)
settings.load_profile("default")

_GH_NODES = 120


def _phi_cdf(x: np.ndarray) -> np.ndarray:
    return 0.5 * erfc(-x / math.sqrt(2.0))


def posterior_moments_oracle(
    mu_i: float,
    sigma_i: float,
    mu_j: float,
    sigma_j: float,
    beta: float,
    epsilon: float,
    outcome: str,
) -> tuple[float, float, float, float]:
    """Posterior (mean_i, std_i, mean_j, std_j) by 2-D numerical integration.

    The latent strengths are independent Gaussians; the observation weight
    is the probability of the observed result under the performance model
    with shared variance beta^2:

    * ``"i_wins"``: performance difference exceeds epsilon,
    * ``"draw"``:   performance difference within +-epsilon (for
      epsilon = 0 the density of an exactly-equal-performance tie).

    Tensor-product Gauss-Hermite quadrature; independent of the closed-form
    update path it is used to check.  Accurate to ~1e-10 for moderate
    rating configurations (|mu_i - mu_j| within a few belief widths).
    """
    x, h = roots_hermite(_GH_NODES)
    wi = mu_i + sigma_i * math.sqrt(2.0) * x
    wj = mu_j + sigma_j * math.sqrt(2.0) * x
    weight = np.outer(h, h)
    diff = wi[:, None] - wj[None, :]
    scale = math.sqrt(2.0) * beta
    if outcome == "i_wins":
        lik = _phi_cdf((diff - epsilon) / scale)
    elif outcome == "draw" and epsilon > 0.0:
        lik = _phi_cdf((epsilon - diff) / scale) - _phi_cdf((-epsilon - diff) / scale)
    elif outcome == "draw":
        lik = np.exp(-0.5 * (diff / scale) ** 2)
    else:
        raise ValueError(f"unknown outcome {outcome!r}")
    w = weight * lik
    z = w.sum()
    wi_grid = np.broadcast_to(wi[:, None], w.shape)
    wj_grid = np.broadcast_to(wj[None, :], w.shape)
    e_i = float((w * wi_grid).sum() / z)
    e_j = float((w * wj_grid).sum() / z)
    v_i = float((w * (wi_grid - e_i) ** 2).sum() / z)
    v_j = float((w * (wj_grid - e_j) ** 2).sum() / z)
    return e_i, math.sqrt(v_i), e_j, math.sqrt(v_j)
