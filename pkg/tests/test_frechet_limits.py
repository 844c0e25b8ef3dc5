import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import integrate

from maxstable_lab.errors import ParameterError
from maxstable_lab.frechet_limits import (
    FidiSpec,
    FrechetLaw,
    extremal_frechet_fidi_cdf,
    frechet_cdf,
    frechet_quantile,
    tail_constant,
    zab_fidi_cdf,
)


def _tail_constant_mp(alpha):
    a = mpmath.mpf(alpha)
    return (1 - a) / (mpmath.gamma(2 - a) * mpmath.cos(mpmath.pi * a / 2))


def test_tail_constant_at_one():
    assert tail_constant(1.0).value == pytest.approx(2 / math.pi, abs=1e-15)
    assert tail_constant(1.0).value == pytest.approx(0.636620, abs=1e-6)


def test_tail_constant_half_by_quadrature():
    # C_alpha = (int_0^inf x^-alpha sin x dx)^-1
    head, _ = integrate.quad(np.sin, 0, 1, weight="alg", wvar=(-0.5, 0))
    tail, _ = integrate.quad(lambda x: x**-0.5, 1, np.inf, weight="sin", wvar=1.0)
    val = head + tail
    assert tail_constant(0.5).value == pytest.approx(1 / val, rel=1e-8)
    assert tail_constant(0.5).value == pytest.approx(math.sqrt(2 / math.pi), abs=1e-12)


@pytest.mark.parametrize("eps", [1e-9, -1e-9, 1e-7, -1e-7, 1e-5, -3e-6])
def test_tail_constant_near_one(eps):
    with mpmath.workdps(50):
        ref = float(_tail_constant_mp(mpmath.mpf(1) + mpmath.mpf(eps)))
    got = tail_constant(1 + eps).value
    assert got == pytest.approx(ref, rel=1e-12)
    assert abs(got - 2 / math.pi) < 1e-6 + 2 * abs(eps)


@settings(max_examples=200)
@given(st.floats(0.01, 1.99))
def test_tail_constant_matches_high_precision(alpha):
    assume(abs(alpha - 1) > 1e-12)
    with mpmath.workdps(40):
        ref = float(_tail_constant_mp(alpha))
    assert tail_constant(alpha).value == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("alpha", [0.0, 2.0, -1.0, 2.5])
def test_tail_constant_domain(alpha):
    with pytest.raises(ParameterError):
        tail_constant(alpha)


def test_frechet_cdf_examples():
    assert frechet_cdf(FrechetLaw(1, 1), 1) == pytest.approx(math.exp(-1), abs=1e-15)
    assert frechet_cdf(FrechetLaw(2, 3), 3) == pytest.approx(math.exp(-1), abs=1e-15)
    assert frechet_cdf(FrechetLaw(1.7, 2.0), 0.0) == 0.0
    assert frechet_cdf(FrechetLaw(1.7, 2.0), -4.0) == 0.0


def test_frechet_quantile_examples():
    assert frechet_quantile(FrechetLaw(1, 1), math.exp(-1)) == pytest.approx(1.0, rel=1e-15)
    assert frechet_quantile(FrechetLaw(2, 1), math.exp(-1)) == pytest.approx(1.0, rel=1e-15)
    law = FrechetLaw(1.3, 0.7)
    for p in (0.01, 0.5, 0.99):
        assert frechet_cdf(law, frechet_quantile(law, p)) == pytest.approx(p, abs=10 * np.spacing(p))


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
def test_frechet_quantile_domain(p):
    with pytest.raises(ParameterError):
        frechet_quantile(FrechetLaw(1, 1), p)


@pytest.mark.parametrize("alpha,sigma", [(0, 1), (1, 0), (-1, 1), (1, -2), (math.inf, 1)])
def test_frechet_law_validation(alpha, sigma):
    with pytest.raises(ParameterError):
        FrechetLaw(alpha, sigma)


@settings(max_examples=100)
@given(st.floats(0.1, 5), st.floats(0.1, 10), st.floats(1e-3, 1 - 1e-3))
def test_quantile_round_trip(alpha, sigma, p):
    law = FrechetLaw(alpha, sigma)
    assert law.cdf(law.quantile(p)) == pytest.approx(p, rel=1e-12, abs=1e-14)


def test_zab_fidi_single_time():
    assert zab_fidi_cdf(FidiSpec(1, 0.75, (1.0,), (1.0,))) == pytest.approx(math.exp(-1))
    spec = FidiSpec(1.4, 0.8, (0.6,), (1.3,))
    assert zab_fidi_cdf(spec) == pytest.approx(math.exp(-(0.6**0.8) * 1.3**-1.4), rel=1e-15)


def test_zab_fidi_telescopes_for_equal_thresholds():
    spec = FidiSpec(1.2, 0.7, (0.1, 0.4, 0.9), (1.5, 1.5, 1.5))
    assert zab_fidi_cdf(spec) == pytest.approx(math.exp(-(0.9**0.7) * 1.5**-1.2), rel=1e-14)


def test_zab_fidi_two_times():
    want = math.exp(-(2**-0.75 * 1 + (1 - 2**-0.75) * 0.5))
    assert want == pytest.approx(0.45055, abs=1e-5)
    assert zab_fidi_cdf(FidiSpec(1, 0.75, (0.5, 1.0), (1.0, 2.0))) == pytest.approx(want, rel=1e-14)


def test_extremal_fidi_examples():
    assert extremal_frechet_fidi_cdf(1, (1.0,), (1.0,)) == pytest.approx(math.exp(-1))
    assert extremal_frechet_fidi_cdf(1, (1.0, 2.0), (1.0, 1.0)) == pytest.approx(math.exp(-2))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(alpha=1, beta=0.4, times=(1.0,), thresholds=(1.0,)),
        dict(alpha=1, beta=1.1, times=(1.0,), thresholds=(1.0,)),
        dict(alpha=0, beta=0.8, times=(1.0,), thresholds=(1.0,)),
        dict(alpha=1, beta=0.8, times=(), thresholds=()),
        dict(alpha=1, beta=0.8, times=(0.5, 0.5), thresholds=(1.0, 1.0)),
        dict(alpha=1, beta=0.8, times=(0.0, 0.5), thresholds=(1.0, 1.0)),
        dict(alpha=1, beta=0.8, times=(0.5,), thresholds=(1.0, 2.0)),
        dict(alpha=1, beta=0.8, times=(0.5,), thresholds=(0.0,)),
    ],
)
def test_fidi_spec_validation(kwargs):
    with pytest.raises(ParameterError):
        FidiSpec(**kwargs)


@st.composite
def fidi_specs(draw, beta=None):
    d = draw(st.integers(1, 4))
    times = sorted(draw(st.lists(st.floats(0.01, 5.0), min_size=d, max_size=d, unique=True)))
    assume(all(b - a > 1e-6 for a, b in zip(times, times[1:])))
    lam = draw(st.lists(st.floats(0.05, 20.0), min_size=d, max_size=d))
    alpha = draw(st.floats(0.2, 1.95))
    b = draw(st.floats(0.51, 1.0)) if beta is None else beta
    return FidiSpec(alpha, b, tuple(times), tuple(lam))


@settings(max_examples=150)
@given(fidi_specs(), st.data())
def test_fidi_monotone(spec, data):
    i = data.draw(st.integers(0, spec.d - 1))
    base = zab_fidi_cdf(spec)
    lam = list(spec.thresholds)
    lam[i] *= 1.5
    assert zab_fidi_cdf(FidiSpec(spec.alpha, spec.beta, spec.times, tuple(lam))) >= base - 1e-15
    times = list(spec.times)
    hi = times[i + 1] if i + 1 < spec.d else times[i] * 2
    times[i] = times[i] + 0.5 * (hi - times[i])
    assume(times[i] < hi)
    assert zab_fidi_cdf(FidiSpec(spec.alpha, spec.beta, tuple(times), spec.thresholds)) <= base + 1e-15


@settings(max_examples=100)
@given(fidi_specs())
def test_fidi_consistency_when_last_threshold_infinite(spec):
    assume(spec.d >= 2)
    dropped = FidiSpec(spec.alpha, spec.beta, spec.times[:-1], spec.thresholds[:-1])
    huge = FidiSpec(spec.alpha, spec.beta, spec.times, spec.thresholds[:-1] + (1e300,))
    assert zab_fidi_cdf(huge) == pytest.approx(zab_fidi_cdf(dropped), rel=1e-13, abs=1e-300)


@settings(max_examples=150)
@given(fidi_specs(), st.floats(0.05, 20.0))
def test_fidi_self_similar(spec, c):
    h = spec.beta / spec.alpha
    moved = FidiSpec(spec.alpha, spec.beta, tuple(c * t for t in spec.times),
                     tuple(c**h * x for x in spec.thresholds))
    assert zab_fidi_cdf(moved) == pytest.approx(zab_fidi_cdf(spec), rel=1e-12, abs=1e-300)


@settings(max_examples=100)
@given(st.floats(0.2, 1.95), st.floats(0.51, 1.0), st.floats(0.01, 3), st.floats(0.05, 20))
def test_fidi_marginal_is_frechet(alpha, beta, t, lam):
    got = zab_fidi_cdf(FidiSpec(alpha, beta, (t,), (lam,)))
    want = frechet_cdf(FrechetLaw(alpha, t ** (beta / alpha)), lam)
    assert got == pytest.approx(want, rel=1e-13, abs=1e-300)


@settings(max_examples=20)
@given(fidi_specs(beta=1.0))
def test_extremal_equals_beta_one(spec):
    assert extremal_frechet_fidi_cdf(spec.alpha, spec.times, spec.thresholds) == zab_fidi_cdf(spec)


@settings(max_examples=100)
@given(fidi_specs())
def test_fidi_is_probability(spec):
    assert 0.0 <= zab_fidi_cdf(spec) <= 1.0
