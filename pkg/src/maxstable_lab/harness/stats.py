"""ECDF, Kolmogorov-Smirnov distances and gates, and the log-log slope."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import kstwobign

from ..errors import ContractViolation

# asymptotic Kolmogorov quantiles sqrt(N) * D at the given significance level
KS_QUANTILES = {0.05: 1.3581, 0.01: 1.6276}


def ks_quantile(level: float) -> float:
    if level in KS_QUANTILES:
        return KS_QUANTILES[level]
    return float(kstwobign.isf(level))


@dataclass
class KsReport:
    """Verdict of one gate.

    ``metric`` is ``ks`` (one-sample), ``ks2`` (two-sample), ``ks_tol``
    (one-sample KS against a fixed tolerance) or an absolute-error metric.
    ``level`` is None when the threshold is a fixed tolerance rather than a
    KS quantile.
    """

    name: str
    statistic: float
    sample_size: int
    level: float | None
    threshold: float
    passed: bool
    metric: str = "ks"
    context: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"[{verdict}] {self.name}: {self.metric}={self.statistic:.6g} "
            f"threshold={self.threshold:.6g} N={self.sample_size}"
        )


class Ecdf:
    """Right-continuous empirical CDF."""

    def __init__(self, samples):
        x = np.sort(np.asarray(samples, dtype=float).ravel())
        if x.size == 0:
            raise ContractViolation("ECDF of an empty sample")
        self.sorted = x
        self.n = x.size

    def __call__(self, q):
        out = np.searchsorted(self.sorted, q, side="right") / self.n
        return float(out) if np.ndim(out) == 0 else out


def ecdf(samples) -> Ecdf:
    return Ecdf(samples)


def ks_distance(samples, cdf: Callable, cdf_left: Callable | None = None) -> float:
    """``sup_x |F_N(x) - F(x)|`` against a reference CDF.

    For continuous ``F`` this is the usual
    ``max_i max(i/N - F(x_(i)), F(x_(i)) - (i-1)/N)``.  Ties are grouped so
    that the sup is exact for discrete laws too, provided ``cdf_left`` gives
    the left limits ``F(x-)`` at the atoms.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise ContractViolation("KS distance of an empty sample")
    n = x.size
    values, counts = np.unique(x, return_counts=True)
    upper = np.cumsum(counts) / n
    lower = upper - counts / n
    F = np.asarray(cdf(values), dtype=float)
    F_left = F if cdf_left is None else np.asarray(cdf_left(values), dtype=float)
    return float(max(np.max(np.abs(upper - F)), np.max(np.abs(lower - F_left))))


def ks_two_sample(a, b) -> float:
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise ContractViolation("two-sample KS needs two nonempty samples")
    pooled = np.concatenate([a, b])
    Fa = np.searchsorted(a, pooled, side="right") / a.size
    Fb = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(Fa - Fb)))


def ks_gate(name, samples, cdf, level=0.05, cdf_left=None, context=None) -> KsReport:
    n = np.asarray(samples).size
    d = ks_distance(samples, cdf, cdf_left)
    thr = ks_quantile(level) / np.sqrt(n)
    return KsReport(name, d, n, level, float(thr), bool(d <= thr), "ks", dict(context or {}))


def ks_tolerance_gate(name, samples, cdf, tolerance, context=None) -> KsReport:
    n = np.asarray(samples).size
    d = ks_distance(samples, cdf)
    return KsReport(name, d, n, None, float(tolerance), bool(d < tolerance), "ks_tol", dict(context or {}))


def ks2_gate(name, a, b, level=0.05, context=None) -> KsReport:
    na, nb = np.asarray(a).size, np.asarray(b).size
    d = ks_two_sample(a, b)
    thr = ks_quantile(level) * np.sqrt((na + nb) / (na * nb))
    ctx = {"sizes": [int(na), int(nb)], **(context or {})}
    return KsReport(name, d, min(na, nb), level, float(thr), bool(d <= thr), "ks2", ctx)


def tolerance_gate(name, value, tolerance, sample_size=0, metric="abs_err", context=None) -> KsReport:
    value = float(value)
    return KsReport(
        name, value, int(sample_size), None, float(tolerance),
        bool(value < tolerance), metric, dict(context or {}),
    )


def rv_index_estimate(pairs) -> float:
    """Least-squares slope of ``log(value)`` against ``log(n)``."""
    pairs = list(pairs)
    if len(pairs) < 3:
        raise ContractViolation("need at least three (n, value) pairs")
    n = np.array([p[0] for p in pairs], dtype=float)
    v = np.array([p[1] for p in pairs], dtype=float)
    if np.any(np.diff(n) <= 0) or np.any(n <= 0) or np.any(v <= 0):
        raise ContractViolation("n must be positive and strictly increasing, values positive")
    x = np.log(n)
    y = np.log(v)
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))
