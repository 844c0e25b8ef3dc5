"""Series sampler for the stationary SaS process and its partial maxima.

For ``f = 1_A`` on the ladder chain the normalised process is

    X_k / b_n = C_alpha**(1/alpha) * sum_j eps_j * Gamma_j**(-1/alpha) * 1{k in V_j},

where ``eps_j`` are Rademacher signs, ``Gamma_j`` unit-rate Poisson arrivals
and ``V_j`` the visit times to state 0 of independent trajectories drawn from
``mu_n`` (the law ``eta_n`` reduces to ``mu_n`` because ``max_i |f_i| = 1`` on
``{phi_A <= n}``).  The series is cut after ``truncation_J`` terms; only times
visited by some record are ever touched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import kernels
from .errors import ParameterError
from .frechet_limits import tail_constant
from .ladder_flow import LadderChain, _check_horizon, flow_rates, initial_state_weights
from .randkit import RngStream, poisson_arrivals, sample_rademacher

DEFAULT_TRUNCATION = 1000
DEFAULT_GRID = (0.25, 0.5, 0.75, 1.0)

LANE_ARRIVALS = 0
LANE_SIGNS = 1
LANE_RECORDS = 2


@dataclass(frozen=True)
class SeriesConfig:
    alpha: float
    n: int
    truncation_J: int = DEFAULT_TRUNCATION
    grid: tuple = DEFAULT_GRID

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(t) for t in self.grid))
        if not 0.0 < self.alpha < 2.0:
            raise ParameterError(f"alpha must lie in (0, 2), got {self.alpha}")
        if int(self.n) < 1:
            raise ParameterError(f"n must be positive, got {self.n}")
        if int(self.truncation_J) < 1:
            raise ParameterError(f"truncation_J must be positive, got {self.truncation_J}")
        g = self.grid
        if not g or g[0] <= 0 or g[-1] > 1 or any(b <= a for a, b in zip(g, g[1:])):
            raise ParameterError(f"grid must be strictly increasing within (0, 1]: {g}")

    def grid_indices(self) -> np.ndarray:
        # floor(n t); the nudge keeps t = k/n from rounding down to k - 1
        return np.floor(self.n * np.asarray(self.grid) + 1e-9).astype(np.int64)


@dataclass(frozen=True)
class MaximaPath:
    grid: tuple
    values: np.ndarray


def expected_tail_magnitude(alpha: float, j: int) -> float:
    """``E[Gamma_j**(-1/alpha)] = Gamma(j - 1/alpha) / Gamma(j)``, finite for ``j > 1/alpha``."""
    if j <= 1.0 / alpha:
        return math.inf
    return math.exp(gammaln(j - 1.0 / alpha) - gammaln(j))


def tail_second_moment_bound(alpha: float, J: int) -> float:
    """``sum_{j > J} E[Gamma_j**(-2/alpha)]``, the L2 size of the dropped series.

    Uses the integral bound ``J**(1 - 2/alpha) / (2/alpha - 1)`` on
    ``sum_{j > J} j**(-2/alpha)``, with the ratio of Gamma functions replaced
    by its power asymptote.  Kept for comparison: for ``alpha`` near 2 this
    bound decays so slowly that it is useless for choosing ``J``.
    """
    p = 2.0 / alpha
    return J ** (1.0 - p) / (p - 1.0)


def choose_truncation(alpha: float, tolerance: float) -> int:
    """Smallest ``J`` whose first dropped point has mean magnitude below ``tolerance``.

    The criterion bounds how much the discarded terms can move the running
    maximum: every dropped term is smaller than ``Gamma_{J+1}**(-1/alpha)``,
    and a term only matters at a time its record visits.  ``J`` is never
    smaller than ``ceil(4/alpha) + 1``.
    """
    if not 0.0 < alpha < 2.0:
        raise ParameterError(f"alpha must lie in (0, 2), got {alpha}")
    if not tolerance > 0:
        raise ParameterError(f"tolerance must be positive, got {tolerance}")
    floor_J = math.ceil(4.0 / alpha) + 1
    if expected_tail_magnitude(alpha, floor_J + 1) <= tolerance:
        return floor_J
    lo, hi = floor_J, floor_J * 2
    while expected_tail_magnitude(alpha, hi + 1) > tolerance:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if expected_tail_magnitude(alpha, mid + 1) <= tolerance:
            hi = mid
        else:
            lo = mid
    return hi


def series_weights(rng: RngStream, alpha: float, J: int, negate_signs: bool = False) -> np.ndarray:
    """Signed series coefficients ``C_alpha**(1/alpha) eps_j Gamma_j**(-1/alpha)``.

    Arrivals and signs come from dedicated lanes of ``rng``, so the first
    ``J`` coefficients do not depend on how many are requested.
    """
    gammas = poisson_arrivals(rng.lane(LANE_ARRIVALS), J)
    signs = sample_rademacher(rng.lane(LANE_SIGNS), J)
    if negate_signs:
        signs = -signs
    scale = tail_constant(alpha).value ** (1.0 / alpha)
    return scale * signs * gammas ** (-1.0 / alpha)


def _path_values(rng, chain, cfg, cw, grid_idx, negate_signs=False):
    weights = series_weights(rng, cfg.alpha, cfg.truncation_J, negate_signs)
    rec = rng.lane(LANE_RECORDS)
    return kernels.partial_maxima(
        rec.k0, rec.k1, chain.return_cdf_table, cw, cfg.n, weights, grid_idx
    )


def sample_partial_maxima(
    rng: RngStream, chain: LadderChain, cfg: SeriesConfig, negate_signs: bool = False
) -> MaximaPath:
    """One path of ``max_{k <= floor(nt)} |X_k| / b_n`` on ``cfg.grid``.

    The result depends only on the keys of ``rng`` (not on its position):
    use one stream per path.
    """
    _check_horizon(chain, cfg.n)
    values = _path_values(
        rng, chain, cfg, initial_state_weights(chain, cfg.n), cfg.grid_indices(), negate_signs
    )
    if np.any(np.diff(values) < 0) or np.any(values < 0):
        raise ArithmeticError("partial maxima path is not nonnegative and nondecreasing")
    return MaximaPath(grid=cfg.grid, values=values)


def sample_partial_maxima_batch(
    master_seed: int, path_indices, chain: LadderChain, cfg: SeriesConfig
) -> np.ndarray:
    """One row per stream ``(master_seed, i)``; row-for-row identical to
    :func:`sample_partial_maxima` on ``derive_stream(master_seed, i)``."""
    _check_horizon(chain, cfg.n)
    cw = initial_state_weights(chain, cfg.n)
    grid_idx = cfg.grid_indices()
    out = np.empty((len(path_indices), len(cfg.grid)))
    for row, idx in enumerate(path_indices):
        out[row] = _path_values(RngStream(master_seed, int(idx)), chain, cfg, cw, grid_idx)
    if np.any(np.diff(out, axis=1) < 0) or np.any(out < 0):
        raise ArithmeticError("partial maxima path is not nonnegative and nondecreasing")
    return out


def normaliser(chain: LadderChain, n: int, alpha: float) -> float:
    """``b_n = w_n**(1/alpha)``, exact for ``f = 1_A`` on the ladder chain."""
    return flow_rates(chain, n, alpha).b_n
