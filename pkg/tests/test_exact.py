import math

import numpy as np
import pytest
from scipy.stats import binom

from cwlo.exact import (
    LogValue,
    NuDensity,
    bernoulli_qnp,
    log_binom_pmf,
    log_O_even,
    log_O_odd,
    log_partition,
    nu_density,
    nu_total_mass,
    pn_odd_exact,
    qn_bounds,
    qn_even_exact,
    qn_even_via_mixture,
    qn_plus_exact,
)
from cwlo.model import ModelParams

from helpers import brute_log_balance, brute_log_partition, brute_magnetization_law

E = math.e
# 16-configuration hand sums at (d=1, beta=1, h=0), n=4
LOG_Z4 = math.log(2 * E**4 + 8 * E + 6)
LOG_O4 = math.log(2 * E**4 + 4)


def test_log_partition_examples():
    assert log_partition(ModelParams(3, 0.0, 0.0), 7).log_value == pytest.approx(7 * math.log(2), rel=1e-15)
    assert log_partition(ModelParams(1, 0.25, 0.0), 2).log_value == pytest.approx(math.log(2 + 2 * math.exp(0.5)), rel=1e-15)
    assert log_partition(ModelParams(1, 1.0, 0.0), 4).log_value == pytest.approx(LOG_Z4, rel=1e-15)


def test_logvalue_split():
    lv = log_partition(ModelParams(1, 1.0, 0.3), 5000)
    assert lv.log_value == lv.reduced + lv.scale
    assert float(lv) == lv.log_value
    assert isinstance(lv, LogValue)


def test_log_partition_large_n_finite():
    lv = log_partition(ModelParams(2, 1.3, 0.4), 10**7)
    assert math.isfinite(lv.log_value)


@pytest.mark.parametrize("log_p", [math.log(0.5), math.log(0.1), math.log(0.97)])
@pytest.mark.parametrize("n", [1, 7, 15, 16, 40, 1000])
def test_log_binom_pmf_matches_scipy(n, log_p):
    k = np.arange(n + 1)
    prob = math.exp(log_p)
    ref = binom.logpmf(k, n, prob)
    got = log_binom_pmf(k, n, log_p, math.log1p(-prob))
    mask = ref > -600
    assert np.allclose(got[mask], ref[mask], rtol=1e-12, atol=1e-12)


def test_qn_plus_examples():
    r = qn_plus_exact(ModelParams(1, 0.0, 0.0), 4)
    assert r.probability == pytest.approx(0.375, rel=1e-14)
    assert r.attaining_indices == (2,)
    r = qn_plus_exact(ModelParams(1, 1.0, 0.0), 4)
    assert r.probability == pytest.approx(E**4 / (2 * E**4 + 8 * E + 6), rel=1e-14)
    assert r.attaining_indices == (0, 4)
    assert r.probability == pytest.approx(math.exp(r.log_numerator - r.log_denominator), rel=1e-14)


def test_qn_plus_strong_field_sits_at_all_plus():
    r = qn_plus_exact(ModelParams(1, 0.0, 30.0), 9)
    assert r.attaining_indices == (9,)
    assert r.probability == pytest.approx(1.0, abs=1e-12)


def test_qn_plus_matches_magnetization_law():
    p = ModelParams(1, 0.7, 0.15)
    law = brute_magnetization_law(p, 9)
    r = qn_plus_exact(p, 9)
    assert r.probability == pytest.approx(max(law), rel=1e-12)
    assert r.attaining_indices == (int(np.argmax(law)),)


def test_log_O_even_examples():
    assert log_O_even(ModelParams(1, 0.0, 0.0), 4).log_value == pytest.approx(math.log(6), rel=1e-15)
    assert log_O_even(ModelParams(1, 1.0, 0.0), 4).log_value == pytest.approx(LOG_O4, rel=1e-15)
    p = ModelParams(1, 0.25, 0.3)
    assert log_O_even(p, 6).log_value == pytest.approx(brute_log_balance(p, 6), rel=1e-13)


def test_qn_even_examples():
    assert qn_even_exact(ModelParams(1, 0.0, 0.0), 4).probability == pytest.approx(0.375, rel=1e-14)
    r = qn_even_exact(ModelParams(1, 1.0, 0.0), 4)
    assert r.probability == pytest.approx((2 * E**4 + 4) / (2 * E**4 + 8 * E + 6), rel=1e-14)
    assert r.attaining_indices == (2,)


def test_qn_even_at_zero_beta_is_iid():
    h = 0.7
    prob = math.exp(h) / (math.exp(h) + math.exp(-h))
    assert qn_even_exact(ModelParams(1, 0.0, h), 6).probability == pytest.approx(bernoulli_qnp(6, prob).probability, rel=1e-13)


def test_odd_balance_examples():
    assert pn_odd_exact(ModelParams(1, 0.0, 0.0), 3).probability == pytest.approx(0.375, rel=1e-14)
    for p, n, tol in [(ModelParams(1, 1.0, 0.0), 3, 1e-14), (ModelParams(1, 0.25, 0.3), 5, 1e-13)]:
        assert log_O_odd(p, n).log_value == pytest.approx(brute_log_balance(p, n), rel=tol)


def test_parity_checks():
    p = ModelParams(1, 0.3, 0.0)
    with pytest.raises(ValueError):
        log_O_even(p, 5)
    with pytest.raises(ValueError):
        log_O_odd(p, 4)
    with pytest.raises(ValueError):
        log_partition(p, 0)


def test_qn_bounds():
    p0 = ModelParams(1, 0.0, 0.0)
    assert qn_bounds(p0, 4) == pytest.approx((0.375, 0.375))
    assert qn_bounds(p0, 3) == pytest.approx((0.375, 0.5))
    for p in (ModelParams(1, 0.3, 0.0), ModelParams(1, 1.0, 0.2), ModelParams(2, 0.25, 0.0)):
        lo, hi = qn_bounds(p, 5)
        assert lo <= hi


def test_bernoulli_examples():
    r = bernoulli_qnp(2, 0.5)
    assert r.probability == pytest.approx(0.5)
    assert (1, 0) in r.attaining_indices
    r = bernoulli_qnp(2, 0.9)
    assert r.probability == pytest.approx(0.82, rel=1e-14)
    assert r.attaining_indices == ((1, 0),)
    r = bernoulli_qnp(4, 0.5)
    assert r.probability == pytest.approx(0.375)
    assert (2, 0) in r.attaining_indices


def test_bernoulli_degenerate_bias():
    assert bernoulli_qnp(5, 1.0).probability == 1.0
    with pytest.raises(ValueError):
        bernoulli_qnp(3, 1.2)


def test_mixture_examples():
    p = ModelParams(1, 0.3, 0.0)
    assert nu_total_mass(p, 10) == pytest.approx(1.0, abs=1e-8)
    assert qn_even_via_mixture(p, 8) == pytest.approx(qn_even_exact(p, 8).probability, abs=1e-8)


def test_mixture_weak_coupling_limit():
    # nearly independent spins: the mixing law piles up at bias 1/2
    p = ModelParams(1, 1e-4, 0.0)
    assert qn_even_via_mixture(p, 10) == pytest.approx(math.comb(10, 5) / 2**10, rel=1e-3)


def test_nu_density_in_bias_variable():
    p = ModelParams(1, 0.3, 0.0)
    nu = NuDensity(p, 12)
    assert nu(0.5) == pytest.approx(nu_density(p, 12, 0.5))
    # symmetric about 1/2 at zero field
    assert nu(0.3) == pytest.approx(nu(0.7), rel=1e-12)
    with pytest.raises(ValueError):
        nu(1.0)
    with pytest.raises(ValueError):
        NuDensity(ModelParams(1, 0.0, 0.0), 4)


@pytest.mark.parametrize("n", [1, 2, 5, 8, 11])
def test_brute_force_agreement_small_grid(n):
    for p in (ModelParams(1, 0.3, 0.0), ModelParams(1, 0.5, 0.0), ModelParams(2, 0.6, 0.0), ModelParams(1, 0.8, -0.4)):
        assert log_partition(p, n).log_value == pytest.approx(brute_log_partition(p, n), rel=1e-12)
        if n % 2 == 0:
            assert log_O_even(p, n).log_value == pytest.approx(brute_log_balance(p, n), rel=1e-12)
        else:
            # negative h flips to the mirrored odd event, same weight as |h|
            q = p.with_h(abs(p.h))
            assert log_O_odd(p, n).log_value == pytest.approx(brute_log_balance(q, n), rel=1e-12)
