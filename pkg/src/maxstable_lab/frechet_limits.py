"""Closed-form Frechet laws and finite-dimensional CDFs of the limit processes.

``Z_alpha`` is the extremal Frechet process (independent max-increments) and
``Z_{alpha,beta}(t) = Z_alpha(t**beta)`` its time-changed version, which is
self-similar with exponent ``beta/alpha`` and has dependent, stationary
max-increments when ``beta < 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class FrechetLaw:
    """Frechet law with CDF ``exp(-(sigma/x)**alpha)`` on ``x > 0``."""

    alpha: float
    sigma: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ParameterError(f"sigma must be positive, got {self.sigma}")

    def cdf(self, x):
        return frechet_cdf(self, x)

    def quantile(self, p):
        return frechet_quantile(self, p)


@dataclass(frozen=True)
class FidiSpec:
    """Times ``t_1 < ... < t_d`` and thresholds ``lambda_1..lambda_d`` of a joint CDF."""

    alpha: float
    beta: float
    times: tuple
    thresholds: tuple

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "thresholds", tuple(float(x) for x in self.thresholds))
        if not self.alpha > 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        if not 0.5 < self.beta <= 1.0:
            raise ParameterError(f"beta must lie in (1/2, 1], got {self.beta}")
        if len(self.times) < 1 or len(self.times) != len(self.thresholds):
            raise ParameterError("times and thresholds must be nonempty and of equal length")
        if self.times[0] <= 0 or any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ParameterError(f"times must be positive and strictly increasing: {self.times}")
        if any(not lam > 0 for lam in self.thresholds):
            raise ParameterError(f"thresholds must be positive: {self.thresholds}")

    @property
    def d(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class TailConstant:
    alpha: float
    value: float


def tail_constant(alpha: float) -> TailConstant:
    """Stable tail constant ``C_alpha``.

    With ``e = alpha - 1`` the usual expression
    ``(1 - alpha) / (Gamma(2 - alpha) cos(pi alpha / 2))`` equals
    ``(2/pi) / (Gamma(1 - e) * sinc(e/2))``, which has no 0/0 at ``alpha = 1``
    and reduces to ``2/pi`` there.
    """
    if not 0.0 < alpha < 2.0:
        raise ParameterError(f"alpha must lie in (0, 2), got {alpha}")
    e = alpha - 1.0
    value = (2.0 / math.pi) / (math.gamma(1.0 - e) * float(np.sinc(e / 2.0)))
    return TailConstant(alpha=float(alpha), value=value)


def frechet_cdf(law: FrechetLaw, x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(x > 0, np.exp(-((law.sigma / np.where(x > 0, x, 1.0)) ** law.alpha)), 0.0)
    return float(out) if out.ndim == 0 else out


def frechet_quantile(law: FrechetLaw, p):
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise ParameterError("p must lie in the open interval (0, 1)")
    out = law.sigma * (-np.log(p)) ** (-1.0 / law.alpha)
    return float(out) if out.ndim == 0 else out


def _fidi_exponent(alpha, beta, times, thresholds) -> float:
    # suffix minima of the thresholds, paired with the increments of t**beta
    lam = np.minimum.accumulate(np.asarray(thresholds, dtype=float)[::-1])[::-1]
    tb = np.asarray(times, dtype=float) ** beta
    increments = np.diff(tb, prepend=0.0)
    return float(np.sum(increments * lam ** (-alpha)))


def zab_fidi_cdf(spec: FidiSpec) -> float:
    """``P(Z_{alpha,beta}(t_i) <= lambda_i, i = 1..d)``."""
    p = math.exp(-_fidi_exponent(spec.alpha, spec.beta, spec.times, spec.thresholds))
    return min(1.0, max(0.0, p))


def extremal_frechet_fidi_cdf(
    alpha: float, times: Sequence[float], thresholds: Sequence[float]
) -> float:
    """Joint CDF of the extremal Frechet process ``Z_alpha`` (the ``beta = 1`` case)."""
    return zab_fidi_cdf(FidiSpec(alpha, 1.0, tuple(times), tuple(thresholds)))
