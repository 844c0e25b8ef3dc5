import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxstable_lab.errors import ContractViolation, HorizonError, ParameterError
from maxstable_lab.harness.stats import rv_index_estimate
from maxstable_lab.ladder_flow import (
    RenewalRecord,
    build_chain,
    first_entrance,
    first_entrances,
    flow_rates,
    hitting_cdf_exact,
    hitting_cdf_exact_left,
    hitting_limit_gap,
    invariant_mass,
    sample_mu_n_records,
    sample_mu_n_trajectory,
    wandering_rate,
)
from maxstable_lab.randkit import RngStream


@pytest.fixture(scope="module")
def chain():
    return build_chain(0.75, 10**6)


@pytest.fixture(scope="module")
def small_chain():
    return build_chain(0.75, 10**5)


def test_zeta_against_mpmath(chain):
    ref = float(mpmath.zeta(1.25))
    assert chain.zeta_norm == pytest.approx(ref, rel=1e-10)
    assert chain.zeta_norm == pytest.approx(4.59512, abs=1e-5)


@pytest.mark.parametrize("beta", [0.55, 0.6, 0.9, 0.99])
def test_zeta_other_exponents(beta):
    c = build_chain(beta, 100)
    assert c.zeta_norm == pytest.approx(float(mpmath.zeta(2 - beta)), rel=1e-10)


def test_return_law(chain):
    assert chain.pmf[1] == pytest.approx(1 / float(mpmath.zeta(1.25)), rel=1e-10)
    assert chain.pmf[1] == pytest.approx(0.21762, abs=1e-5)
    cdf = chain.return_cdf_table
    assert np.all(np.diff(cdf) >= 0)
    assert cdf[0] == 0.0 and cdf[-1] < 1.0
    # mass beyond the table is the Hurwitz zeta tail
    H = chain.horizon_max
    tail = float(mpmath.zeta(1.25, H + 1)) / float(mpmath.zeta(1.25))
    assert 1.0 - cdf[-1] == pytest.approx(tail, rel=1e-9)
    np.testing.assert_allclose(np.cumsum(chain.pmf), cdf, rtol=0, atol=1e-12)


def test_null_recurrence_partial_means(chain):
    k = np.arange(chain.horizon_max + 1)
    partial = np.cumsum(k * chain.pmf)
    K = np.array([10**3, 10**4, 10**5, 10**6])
    slope = rv_index_estimate(list(zip(K, partial[K])))
    # partial means grow like K**beta, no finite limit
    assert slope == pytest.approx(0.75, abs=0.03)
    assert partial[10**6] > 3 * partial[10**4]


def test_invariant_mass(chain):
    assert invariant_mass(chain, 0) == 1.0
    assert invariant_mass(chain, 1) == pytest.approx(1 - 1 / chain.zeta_norm, rel=1e-14)
    assert invariant_mass(chain, 1) == pytest.approx(0.78238, abs=1e-5)
    i = np.arange(0, 1001)
    balance = chain.survival[i] - chain.survival[i + 1] - chain.survival[0] * chain.pmf[i + 1]
    assert np.max(np.abs(balance)) < 1e-14


def test_invariant_mass_range(chain):
    with pytest.raises(HorizonError):
        invariant_mass(chain, chain.horizon_max + 1)
    with pytest.raises(ParameterError):
        invariant_mass(chain, -1)


def test_wandering_rate_basics(chain):
    assert wandering_rate(chain, 1) == 1.0
    assert np.all(np.diff(chain.wandering) > 0)
    assert flow_rates(chain, 1, 1.5).w_n == 1.0


@pytest.mark.parametrize("n", [10, 10**3, 10**5, 10**6])
def test_bn_alpha_equals_wn(chain, n):
    fr = flow_rates(chain, n, 1.5)
    # independent summation of the two sides
    w = math.fsum(1.0 - math.fsum(chain.pmf[1 : k + 1]) if k else 1.0 for k in range(min(n, 1000)))
    if n <= 1000:
        assert fr.w_n == pytest.approx(w, rel=1e-12)
    assert abs(fr.b_n_alpha - fr.w_n) / fr.w_n < 1e-10


def test_flow_rate_fields(chain):
    fr = flow_rates(chain, 10**4, 0.8)
    assert fr.b_n == pytest.approx(fr.w_n ** (1 / 0.8))
    want = 10**4 / (math.gamma(1.25) * math.gamma(1.75) * fr.w_n)
    assert fr.a_n == pytest.approx(want, rel=1e-14)


def test_wandering_doubling_ratio(chain):
    n = 5 * 10**5
    assert chain.wandering[2 * n] / chain.wandering[n] == pytest.approx(2**0.75, abs=0.01)


def test_flow_rates_horizon(chain):
    with pytest.raises(HorizonError):
        flow_rates(chain, chain.horizon_max + 1, 1.0)
    with pytest.raises(ParameterError):
        flow_rates(chain, 10, 2.0)


@pytest.mark.parametrize("beta", [0.5, 1.0, 0.3])
def test_build_chain_beta_range(beta):
    with pytest.raises(ParameterError):
        build_chain(beta, 10)


def test_chain_tables_are_read_only(small_chain):
    with pytest.raises(ValueError):
        small_chain.wandering[3] = 0.0


def test_first_entrance_examples():
    assert first_entrance(RenewalRecord(0, (3, 7, 8))) == 3
    with pytest.raises(ContractViolation):
        first_entrance(RenewalRecord(0, ()))


def test_trajectory_structure(small_chain):
    n = 1000
    rng = RngStream(5, 0)
    for _ in range(300):
        rec = sample_mu_n_trajectory(rng, small_chain, n)
        v = rec.visit_times
        assert v and v[0] <= n and v[-1] <= n
        assert all(b > a for a, b in zip(v, v[1:]))
        if rec.initial_state >= 1:
            assert v[0] == rec.initial_state
    assert rng.position == 300


def test_trajectory_matches_batch(small_chain):
    n = 5000
    states, offsets, times = sample_mu_n_records(RngStream(9, 0), small_chain, n, 20)
    rng = RngStream(9, 0)
    for j in range(20):
        rec = sample_mu_n_trajectory(rng, small_chain, n)
        assert rec.initial_state == states[j]
        assert rec.visit_times == tuple(times[offsets[j] : offsets[j + 1]])


def test_batches_concatenate(small_chain):
    n = 2000
    full = sample_mu_n_records(RngStream(4, 0), small_chain, n, 40)
    a = sample_mu_n_records(RngStream(4, 0), small_chain, n, 15)
    b = sample_mu_n_records(RngStream(4, 0), small_chain, n, 25, first_record=15)
    assert np.array_equal(full[0], np.concatenate([a[0], b[0]]))
    assert np.array_equal(full[2], np.concatenate([a[2], b[2]]))


def test_hitting_probability_at_half(small_chain):
    n = 10**5
    _, offsets, times = sample_mu_n_records(RngStream(21, 0), small_chain, n, 10**4)
    first = first_entrances(offsets, times)
    assert np.all(first <= n)
    exact = small_chain.wandering[n // 2] / small_chain.wandering[n]
    assert abs(np.mean(first <= n // 2) - exact) < 0.015
    assert abs(np.mean(first <= n // 2) - 2**-0.75) < 0.015


def test_renewal_gaps(small_chain):
    n = 10**5
    _, offsets, times = sample_mu_n_records(RngStream(22, 0), small_chain, n, 4000)
    unit_gaps = 0
    chances = 0
    for j in range(4000):
        v = times[offsets[j] : offsets[j + 1]]
        unit_gaps += int(np.sum(np.diff(v) == 1))
        # a visit at t < n always reveals whether the next gap is 1; the raw
        # pooled gap frequency would be biased by the censored last gap
        chances += int(np.sum(v < n))
    assert chances > 10**4
    assert abs(unit_gaps / chances - 1 / small_chain.zeta_norm) < 0.01


def test_initial_state_law(small_chain):
    n = 50
    states, _, _ = sample_mu_n_records(RngStream(23, 0), small_chain, n, 20000)
    w = small_chain.wandering[n]
    assert abs(np.mean(states == 0) - small_chain.return_cdf_table[n] / w) < 0.01
    assert abs(np.mean(states == 1) - small_chain.survival[1] / w) < 0.01


@settings(max_examples=40)
@given(st.floats(0.0, 1.0))
def test_hitting_cdf_bounds(x):
    c = build_chain(0.75, 1000)
    F = float(hitting_cdf_exact(c, 1000, x))
    FL = float(hitting_cdf_exact_left(c, 1000, x))
    assert 0.0 <= FL <= F <= 1.0


def test_hitting_cdf_at_lattice(small_chain):
    n = 1000
    k = np.arange(1, n + 1)
    F = hitting_cdf_exact(small_chain, n, k / n)
    np.testing.assert_array_equal(F, small_chain.wandering[k] / small_chain.wandering[n])
    FL = hitting_cdf_exact_left(small_chain, n, k / n)
    np.testing.assert_array_equal(FL, small_chain.wandering[k - 1] / small_chain.wandering[n])
    assert hitting_cdf_exact(small_chain, n, 1.0) == 1.0


def test_hitting_limit_gap_shrinks(small_chain):
    gaps = [hitting_limit_gap(small_chain, n) for n in (10**2, 10**3, 10**5)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.02
