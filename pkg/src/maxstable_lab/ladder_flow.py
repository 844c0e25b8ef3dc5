"""A null-recurrent ladder chain under the left shift.

From state 0 the chain jumps to ``j - 1`` with probability ``P_0(phi = j)``;
from ``i >= 1`` it steps down to ``i - 1``.  The return time ``phi`` to
state 0 has the Zipf-type law ``P_0(phi = k) = k**-(2 - beta) / zeta(2 - beta)``
so ``P_0(phi > k)`` is regularly varying with index ``-(1 - beta)`` and the
wandering rate is regularly varying with index ``beta``.

The reference set is ``A = {x_0 = 0}`` and the kernel is ``f = 1_A``.  Under
``mu = sum_i pi_i P_i`` with ``pi_i = P_0(phi > i)`` a trajectory starting at
``i >= 1`` first enters ``A`` at time ``i``; afterwards the visit times form a
renewal process with gaps distributed as ``phi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ContractViolation, HorizonError, ParameterError
from .randkit import RngStream

ZETA_TERMS = 10**6
DEFAULT_HORIZON = 2 * 10**6


def _zipf_tail_remainder(s: float, start: int) -> float:
    """``sum_{k >= start} k**-s`` by Euler-Maclaurin (three correction terms)."""
    K = float(start)
    return (
        K ** (1.0 - s) / (s - 1.0)
        + 0.5 * K ** (-s)
        + s * K ** (-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * K ** (-s - 3.0) / 720.0
    )


@dataclass(frozen=True, eq=False)
class LadderChain:
    beta: float
    zeta_norm: float
    horizon_max: int
    pmf: np.ndarray = field(repr=False)
    return_cdf_table: np.ndarray = field(repr=False)
    survival: np.ndarray = field(repr=False)
    wandering: np.ndarray = field(repr=False)

    @property
    def exponent(self) -> float:
        return 2.0 - self.beta


@dataclass(frozen=True)
class FlowRates:
    n: int
    w_n: float
    b_n_alpha: float
    a_n: float
    alpha: float

    @property
    def b_n(self) -> float:
        return self.b_n_alpha ** (1.0 / self.alpha)


@dataclass(frozen=True)
class RenewalRecord:
    initial_state: int
    visit_times: tuple


def build_chain(beta: float, horizon_max: int = DEFAULT_HORIZON) -> LadderChain:
    """Tabulate the return law, invariant masses and wandering rates.

    All arrays are indexed by ``k`` directly: ``pmf[k] = P_0(phi = k)``,
    ``return_cdf_table[k] = P_0(phi <= k)``, ``survival[k] = P_0(phi > k)``
    (which is also ``pi_k``) and ``wandering[n] = w_n``, for
    ``0 <= k, n <= horizon_max``.
    """
    if not 0.5 < beta < 1.0:
        raise ParameterError(f"beta must lie in (1/2, 1), got {beta}")
    horizon_max = int(horizon_max)
    if horizon_max < 1:
        raise ParameterError(f"horizon_max must be positive, got {horizon_max}")
    s = 2.0 - beta
    K = max(ZETA_TERMS, horizon_max)
    terms = np.arange(1, K + 1, dtype=float) ** (-s)
    # tail[k-1] = sum_{j >= k} j**-s, summed from small terms to large
    tail = np.cumsum(terms[::-1])[::-1] + _zipf_tail_remainder(s, K + 1)
    zeta = float(tail[0])

    H = horizon_max
    pmf = np.empty(H + 1)
    pmf[0] = 0.0
    pmf[1:] = terms[:H] / zeta
    survival = np.empty(H + 1)
    survival[:H] = tail[:H] / zeta
    survival[H] = (tail[H] if H < K else _zipf_tail_remainder(s, K + 1)) / zeta
    survival[0] = 1.0
    cdf = 1.0 - survival
    wandering = np.concatenate(([0.0], np.cumsum(survival[:H])))
    for arr in (pmf, cdf, survival, wandering):
        arr.setflags(write=False)
    return LadderChain(
        beta=float(beta),
        zeta_norm=zeta,
        horizon_max=H,
        pmf=pmf,
        return_cdf_table=cdf,
        survival=survival,
        wandering=wandering,
    )


def _check_horizon(chain: LadderChain, n: int):
    if n < 1:
        raise ParameterError(f"horizon must be positive, got {n}")
    if n > chain.horizon_max:
        raise HorizonError(f"n = {n} exceeds horizon_max = {chain.horizon_max}")


def invariant_mass(chain: LadderChain, i: int) -> float:
    """``pi_i = P_0(phi > i)``, normalised so that ``pi_0 = 1``."""
    if i < 0:
        raise ParameterError(f"state must be nonnegative, got {i}")
    if i > chain.horizon_max:
        raise HorizonError(f"state {i} exceeds horizon_max = {chain.horizon_max}")
    return float(chain.survival[i])


def wandering_rate(chain: LadderChain, n):
    return chain.wandering[n]


def flow_rates(chain: LadderChain, n: int, alpha: float) -> FlowRates:
    _check_horizon(chain, n)
    if not 0.0 < alpha < 2.0:
        raise ParameterError(f"alpha must lie in (0, 2), got {alpha}")
    w_n = float(chain.wandering[n])
    # mu(phi_A <= n): start in 1..n, or start at 0 and return by time n
    b_n_alpha = float(math.fsum(chain.survival[1 : n + 1]) + chain.return_cdf_table[n])
    a_n = n / (math.gamma(2.0 - chain.beta) * math.gamma(1.0 + chain.beta) * w_n)
    return FlowRates(n=n, w_n=w_n, b_n_alpha=b_n_alpha, a_n=a_n, alpha=float(alpha))


def initial_state_weights(chain: LadderChain, n: int) -> np.ndarray:
    """Cumulative (unnormalised) weights of the starting state under ``mu_n``.

    Index 0 carries ``P_0(phi <= n)``, index ``i`` in ``1..n`` carries ``pi_i``;
    the total is ``w_n``.
    """
    _check_horizon(chain, n)
    weights = np.empty(n + 1)
    weights[0] = chain.return_cdf_table[n]
    weights[1:] = chain.survival[1 : n + 1]
    return np.cumsum(weights)


def sample_mu_n_records(
    rng: RngStream, chain: LadderChain, n: int, count: int, first_record: int = 0
):
    """Draw ``count`` independent trajectories from ``mu_n``.

    Returns ``(initial_states, offsets, times)``: record ``j`` has visit times
    ``times[offsets[j]:offsets[j+1]]``.  Record ``first_record + j`` reads the
    uniforms at counters ``((first_record + j) << 32) | m`` of ``rng``, so the
    output does not depend on the backend or on how records are batched.
    """
    _check_horizon(chain, n)
    cw = initial_state_weights(chain, n)
    return kernels.renewal_visits(
        rng.k0, rng.k1, chain.return_cdf_table, cw, n, int(count), int(first_record)
    )


def sample_mu_n_trajectory(rng: RngStream, chain: LadderChain, n: int) -> RenewalRecord:
    """One trajectory under ``mu_n``; consumes one record slot of ``rng``."""
    _check_horizon(chain, n)
    cw = initial_state_weights(chain, n)
    states, offsets, times = kernels.renewal_visits(
        rng.k0, rng.k1, chain.return_cdf_table, cw, n, 1, rng.position
    )
    rng.position += 1
    return RenewalRecord(initial_state=int(states[0]), visit_times=tuple(int(t) for t in times))


def first_entrance(record: RenewalRecord) -> int:
    if not record.visit_times:
        raise ContractViolation("record has no visit times")
    return min(record.visit_times)


def first_entrances(offsets: np.ndarray, times: np.ndarray) -> np.ndarray:
    """First visit of every record in a CSR batch (visit times are sorted)."""
    if np.any(np.diff(offsets) < 1):
        raise ContractViolation("every record must contain at least one visit")
    return times[offsets[:-1]]


def hitting_cdf_exact(chain: LadderChain, n: int, x):
    """``mu_n(phi_A / n <= x) = w_floor(nx) / w_n`` for ``x`` in [0, 1]."""
    _check_horizon(chain, n)
    x = np.asarray(x, dtype=float)
    # the nudge keeps lattice points k/n from flooring to k - 1
    k = np.clip(np.floor(n * x + 1e-9), 0, n).astype(np.int64)
    return chain.wandering[k] / chain.wandering[n]


def hitting_cdf_exact_left(chain: LadderChain, n: int, x):
    """Left limit ``mu_n(phi_A / n < x)`` of :func:`hitting_cdf_exact`."""
    _check_horizon(chain, n)
    x = np.asarray(x, dtype=float)
    k = np.clip(np.ceil(n * x - 1e-9) - 1, 0, n).astype(np.int64)
    return chain.wandering[k] / chain.wandering[n]


def hitting_limit_gap(chain: LadderChain, n: int) -> float:
    """Sup over (0, 1] of ``|w_floor(nx)/w_n - x**beta|``."""
    _check_horizon(chain, n)
    k = np.arange(0, n + 1)
    step = chain.wandering[k] / chain.wandering[n]
    left = (k / n) ** chain.beta
    right = (np.minimum(k + 1, n) / n) ** chain.beta
    return float(max(np.max(np.abs(step - left)), np.max(np.abs(step[:-1] - right[:-1]))))
