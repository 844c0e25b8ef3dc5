"""Exact samplers for ``Z_{alpha,beta}``, its max-increments and ``Z_alpha``.

All samplers read sup-functionals of one Poisson random measure on
``(0, inf) x (0, S]`` with mean measure ``rho_alpha x Lebesgue``,
``rho_alpha(x, inf) = x**-alpha``.  Sorted by decreasing magnitude its points
are ``((Gamma_k / S)**(-1/alpha), S * U_k)``.  The supremum over a window
``(lo, hi]`` is the magnitude of the first point landing in it, so generation
stops as soon as every requested window has been hit: the samples are exact,
not truncated.

Point ``k`` of a stream uses counters ``2k`` (arrival) and ``2k + 1``
(location), so a path depends only on its own stream and the batch samplers
return the same numbers as the single-path ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GenerationCapError, ParameterError
from .randkit import RngStream, hash_uniforms, poisson_arrivals, stream_keys_array

GENERATION_CAP = 10**7


@dataclass(frozen=True)
class PoissonPointSet:
    magnitudes: np.ndarray
    locations: np.ndarray
    window: float


@dataclass(frozen=True)
class LimitPath:
    grid: tuple
    values: np.ndarray


def _check_alpha_beta(alpha, beta):
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    if not 0.5 < beta <= 1.0:
        raise ParameterError(f"beta must lie in (1/2, 1], got {beta}")


def _check_grid(grid, upper=1.0):
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0 or g[0] <= 0 or np.any(np.diff(g) <= 0):
        raise ParameterError(f"grid must be positive and strictly increasing: {grid}")
    if upper is not None and g[-1] > upper:
        raise ParameterError(f"grid must lie within (0, {upper}]: {grid}")
    return g


def sample_point_set(rng: RngStream, alpha: float, window: float, count: int) -> PoissonPointSet:
    """The ``count`` largest points of the measure on ``(0, inf) x (0, window]``."""
    gammas = poisson_arrivals(rng.lane(0), count)
    locations = window * rng.lane(1).uniforms(count)
    return PoissonPointSet((gammas / window) ** (-1.0 / alpha), locations, float(window))


def window_sup_batch(k0, k1, alpha, window, lo, hi, base=0, cap=GENERATION_CAP):
    """Suprema of point magnitudes over windows ``(lo_w, hi_w]`` for many streams.

    ``k0``/``k1`` are per-stream key arrays; ``base`` the per-stream counter
    offset (scalar or array).  Returns ``(values, points_used)``; a window
    never hit would keep the value 0, but generation only stops once every
    window has been hit.
    """
    k0 = np.asarray(k0, dtype=np.uint64)
    k1 = np.asarray(k1, dtype=np.uint64)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(hi <= lo) or np.any(lo < 0) or np.any(hi > window * (1 + 1e-12)):
        raise ParameterError("windows must satisfy 0 <= lo < hi <= window")
    N, W = k0.size, lo.size
    base = np.broadcast_to(np.asarray(base, dtype=np.uint64), (N,))
    values = np.zeros((N, W))
    filled = np.zeros((N, W), dtype=bool)
    gamma = np.zeros(N)
    used = np.zeros(N, dtype=np.int64)
    active = np.arange(N)
    m = 0
    while active.size:
        if m >= cap:
            raise GenerationCapError(f"{active.size} paths still open after {cap} points")
        c = base[active] + np.uint64(2 * m)
        gamma[active] += -np.log(hash_uniforms(k0[active], k1[active], c))
        s = window * hash_uniforms(k0[active], k1[active], c + np.uint64(1))
        mag = (gamma[active] / window) ** (-1.0 / alpha)
        hit = (s[:, None] > lo) & (s[:, None] <= hi) & ~filled[active]
        values[active] = np.where(hit, mag[:, None], values[active])
        filled[active] |= hit
        m += 1
        used[active] = m
        active = active[~filled[active].all(axis=1)]
    return values, used


def _single(rng: RngStream, alpha, window, lo, hi):
    values, used = window_sup_batch(
        np.array([rng.k0], dtype=np.uint64),
        np.array([rng.k1], dtype=np.uint64),
        alpha, window, lo, hi, base=rng.position,
    )
    rng.position += 2 * int(used[0])
    return values[0]


def _zab_windows(beta, grid):
    g = _check_grid(grid)
    hi = g**beta
    return 1.0, np.zeros_like(hi), hi


def sample_zab_path(rng: RngStream, alpha: float, beta: float, grid) -> LimitPath:
    """``Z_{alpha,beta}`` on a grid in (0, 1] via ``sup_j Gamma_j**(-1/alpha) 1{V_j <= t}``.

    ``V_j = U_j**(1/beta)``, so ``V_j <= t`` is read as ``U_j <= t**beta``:
    a window ``(0, t**beta]`` of a unit-width point set.
    """
    _check_alpha_beta(alpha, beta)
    window, lo, hi = _zab_windows(beta, grid)
    return LimitPath(tuple(float(t) for t in grid), _single(rng, alpha, window, lo, hi))


def sample_zab_paths(master_seed, indices, alpha, beta, grid) -> np.ndarray:
    _check_alpha_beta(alpha, beta)
    window, lo, hi = _zab_windows(beta, grid)
    k0, k1 = stream_keys_array(master_seed, indices)
    return window_sup_batch(k0, k1, alpha, window, lo, hi)[0]


def increment_windows(beta, r, grid):
    """Window of ``Z(r)`` followed by the windows of ``U^(r)(t)`` for ``t`` in grid."""
    g = _check_grid(grid, upper=None)
    if not r > 0:
        raise ParameterError(f"lag r must be positive, got {r}")
    top = (g + r) ** beta
    lo = np.concatenate(([0.0], top - g**beta))
    hi = np.concatenate(([r**beta], top))
    return float(top[-1]), lo, hi


def sample_max_increment_coupled(rng: RngStream, alpha, beta, r, grid):
    """``(Z(r), U^(r) on grid)`` read off one shared point set.

    ``U^(r)(t)`` is the sup over ``[(t+r)**beta - t**beta, (t+r)**beta]`` and
    ``Z(r)`` over ``(0, r**beta]``; their maximum is ``Z(t + r)`` pathwise.
    """
    _check_alpha_beta(alpha, beta)
    window, lo, hi = increment_windows(beta, r, grid)
    values = _single(rng, alpha, window, lo, hi)
    return float(values[0]), LimitPath(tuple(float(t) for t in grid), values[1:])


def sample_max_increment_batch(master_seed, indices, alpha, beta, r, grid):
    _check_alpha_beta(alpha, beta)
    window, lo, hi = increment_windows(beta, r, grid)
    k0, k1 = stream_keys_array(master_seed, indices)
    values = window_sup_batch(k0, k1, alpha, window, lo, hi)[0]
    return values[:, 0], values[:, 1:]


def vn_windows(beta, n_max):
    if int(n_max) < 1:
        raise ParameterError(f"n_max must be positive, got {n_max}")
    top = np.arange(1, int(n_max) + 1, dtype=float) ** beta
    return float(top[-1]), top - 1.0, top


def sample_vn_sequence(rng: RngStream, alpha, beta, n_max) -> np.ndarray:
    """``V_n = sup{j_k : n**beta - 1 < s_k <= n**beta}`` for ``n = 1..n_max``."""
    _check_alpha_beta(alpha, beta)
    window, lo, hi = vn_windows(beta, n_max)
    return _single(rng, alpha, window, lo, hi)


def sample_vn_batch(master_seed, indices, alpha, beta, n_max) -> np.ndarray:
    _check_alpha_beta(alpha, beta)
    window, lo, hi = vn_windows(beta, n_max)
    k0, k1 = stream_keys_array(master_seed, indices)
    return window_sup_batch(k0, k1, alpha, window, lo, hi)[0]


def _frechet_increments(u, alpha, times):
    widths = np.diff(np.asarray(times, dtype=float), prepend=0.0)
    draws = widths ** (1.0 / alpha) * (-np.log(u)) ** (-1.0 / alpha)
    return np.maximum.accumulate(draws, axis=-1)


def sample_extremal_frechet_fidi(rng: RngStream, alpha, times) -> np.ndarray:
    """``Z_alpha`` at ``times`` as a running max of independent Frechet
    increments with scales ``(t_i - t_{i-1})**(1/alpha)``."""
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    times = _check_grid(times, upper=None)
    return _frechet_increments(rng.uniforms(times.size), alpha, times)


def sample_extremal_frechet_batch(master_seed, indices, alpha, times) -> np.ndarray:
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    times = _check_grid(times, upper=None)
    k0, k1 = stream_keys_array(master_seed, indices)
    counters = np.arange(times.size, dtype=np.uint64)
    u = hash_uniforms(k0[:, None], k1[:, None], counters[None, :])
    return _frechet_increments(u, alpha, times)


def hurst_exponent(alpha: float, beta: float) -> float:
    return beta / alpha


def check_moment_bound(alpha: float, beta: float, p: float) -> bool:
    """``H = beta/alpha <= 1/p`` for every moment order ``p < alpha`` that is finite."""
    if not 0 < p < alpha:
        raise ParameterError(f"moment order p must lie in (0, alpha), got {p}")
    return hurst_exponent(alpha, beta) <= 1.0 / p
