import math
import random
from fractions import Fraction

import numpy as np
import pytest

from cwlo.exact import bernoulli_qnp, log_O_even, log_O_odd, log_partition, qn_even_exact, qn_plus_exact
from cwlo.model import ModelParams
from cwlo.oracle import (
    AtomDistribution,
    QuadConfig,
    QuadratureError,
    UnimodalWeights,
    brute_force_qn,
    brute_force_sup,
    configuration_distribution,
    fit_power_law,
    noncrossing_bruteforce,
    parallel_shift_max,
    quad_W,
    quad_W_odd,
    quad_Z_of_x,
)
from cwlo.oracle.quadrature import tanh_sinh
from cwlo.verify import random_unimodal

LOG2 = math.log(2)


def test_tanh_sinh_basic():
    assert tanh_sinh(np.exp, 0.0, 1.0) == pytest.approx(math.e - 1, rel=1e-14)
    assert tanh_sinh(lambda x: 1 / (1 + x * x), -5.0, 5.0) == pytest.approx(2 * math.atan(5.0), rel=1e-13)


def test_tanh_sinh_gives_up():
    cfg = QuadConfig(max_subdivisions=2)
    with pytest.raises(QuadratureError) as info:
        tanh_sinh(lambda x: np.cos(400 * x), 0.0, 10.0, cfg)
    assert info.value.estimate is not None


def test_quadconfig_validation():
    with pytest.raises(ValueError):
        QuadConfig(abs_tol=0.0)


def test_quad_Z_two_spins():
    p = ModelParams(1, 0.25, 0.0)
    val = 2 * LOG2 + quad_Z_of_x(p, 1 / math.sqrt(2))
    assert math.exp(val) == pytest.approx(2 + 2 * math.exp(0.5), rel=1e-8)


@pytest.mark.parametrize("beta, n, tol", [(0.3, 1000, 1e-8), (1.0, 500, 1e-7)])
def test_quad_Z_against_exact(beta, n, tol):
    p = ModelParams(1, beta, 0.0)
    val = n * LOG2 + quad_Z_of_x(p, 1 / math.sqrt(n))
    assert val == pytest.approx(log_partition(p, n).log_value, rel=tol)


def test_quad_W_against_exact():
    p = ModelParams(1, 0.3, 0.0)
    assert 200 * LOG2 + quad_W(p, 1 / math.sqrt(200)) == pytest.approx(log_O_even(p, 200).log_value, rel=1e-6)
    assert 201 * LOG2 + quad_W_odd(p, 1 / math.sqrt(201)) == pytest.approx(log_O_odd(p, 201).log_value, rel=1e-6)
    weak = ModelParams(1, 0.05, 0.0)
    assert 100 * LOG2 + quad_W(weak, 0.1) == pytest.approx(log_O_even(weak, 100).log_value, rel=1e-6)


def test_quad_rejects_bad_input():
    with pytest.raises(ValueError):
        quad_Z_of_x(ModelParams(1, 0.3, 0.0), -1.0)
    with pytest.raises(ValueError):
        quad_W(ModelParams(1, 0.0, 0.0), 0.1)


def test_atom_distribution_merges_and_sorts():
    d = AtomDistribution.from_points([1.0, -1.0, 1.0 + 1e-14, 3.0], [0.25, 0.25, 0.25, 0.25])
    assert d.atoms == [(-1.0, 0.25), (1.0, 0.5), (3.0, 0.25)]
    assert d.total_mass() == pytest.approx(1.0)


def test_sweep_excludes_atoms_two_apart():
    d = AtomDistribution.from_points([-1.0, 1.0], [0.5, 0.5])
    best, _ = d.sup_window(1e-9)
    assert best == 0.5


def test_sup_window_matches_naive():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(1, 11))
        v = rng.choice([-2.0, -1.5, -1.0, 1.0, 1.25, 2.0], size=n)
        p = ModelParams(1, float(rng.uniform(0, 1.2)), float(rng.uniform(-0.5, 0.5)))
        dist = configuration_distribution(p, v)
        assert dist.total_mass() == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.diff(dist.locations) > 0)
        fast, _ = dist.sup_window(1e-9)
        slow, _ = dist.sup_window_naive(1e-9)
        assert fast == pytest.approx(slow, abs=1e-15)


def test_brute_force_sup_examples():
    for p in (ModelParams(1, 0.3, 0.0), ModelParams(1, 1.0, 0.2)):
        best, _ = brute_force_sup(p, np.ones(4))
        assert best == pytest.approx(qn_plus_exact(p, 4).probability, rel=1e-12)
    p = ModelParams(1, 1.0, 0.0)
    best, x = brute_force_sup(p, [1, 1, -1, -1])
    assert best == pytest.approx(qn_even_exact(p, 4).probability, rel=1e-12)
    assert x == 0.0
    best, _ = brute_force_sup(ModelParams(1, 0.0, 0.0), [1, 1.5, 2, -3])
    assert best <= 0.375 + 1e-12
    with pytest.raises(ValueError):
        brute_force_sup(p, [0.5, 1.0])


def test_brute_force_qn_examples():
    p = ModelParams(1, 1.0, 0.0)
    best, v = brute_force_qn(p, 4, [1, 2])
    assert best == pytest.approx(qn_even_exact(p, 4).probability, rel=1e-12)
    assert sorted(v) == [-1, -1, 1, 1]
    best, v = brute_force_qn(ModelParams(1, 0.0, 0.0), 4, [1])
    assert best == pytest.approx(0.375)
    p = ModelParams(1, 0.3, 0.2)
    best, v = brute_force_qn(p, 6, [1, 1.5])
    assert sorted(v) == [-1, -1, -1, 1, 1, 1]
    assert best == pytest.approx(qn_even_exact(p, 6).probability, rel=1e-12)


def test_brute_force_qn_limits():
    with pytest.raises(ValueError):
        brute_force_qn(ModelParams(1, 0.3, 0.0), 13, [1])
    with pytest.raises(ValueError):
        brute_force_qn(ModelParams(1, 0.3, 0.0), 3, [0.5])


def test_parallel_shift_examples():
    q = Fraction(1, 4)
    assert parallel_shift_max((q, 2 * q, q), (q, 2 * q, q)) == (Fraction(3, 8), 0)
    assert parallel_shift_max((1,), (1,)) == (1, 0)
    assert noncrossing_bruteforce((q, 2 * q, q), (q, 2 * q, q)) == Fraction(3, 8)
    assert parallel_shift_max((1, 0, 0), (0, 0, 1)) == (1, -2)
    assert noncrossing_bruteforce((1, 0, 0), (0, 0, 1)) == 1


def test_parallel_shift_reproduces_bernoulli_split():
    # blocks of sizes 2 and 1 at bias 0.9: the best shift is the iid concentration for n = 3
    f = (Fraction(81, 100), Fraction(18, 100), Fraction(1, 100))
    g = (Fraction(9, 10), Fraction(1, 10))
    best, d = parallel_shift_max(f, g)
    assert (best, d) == (Fraction(747, 1000), 0)
    r = bernoulli_qnp(3, 0.9)
    assert float(best) == pytest.approx(r.probability, rel=1e-15)
    assert (2, 1) in r.attaining_indices


def test_unimodal_validation():
    with pytest.raises(ValueError):
        UnimodalWeights((1, 0, 1))
    with pytest.raises(ValueError):
        UnimodalWeights((-1, 2))
    with pytest.raises(ValueError):
        UnimodalWeights(())
    assert len(UnimodalWeights((0, 3, 3, 1))) == 4


def test_random_pairs_agree():
    rng = random.Random(11)
    for _ in range(100):
        f = random_unimodal(rng, rng.randint(1, 7))
        g = random_unimodal(rng, rng.randint(1, 7))
        assert parallel_shift_max(f, g)[0] == noncrossing_bruteforce(f, g)


def test_fit_power_law():
    ns = [2**k for k in range(8, 17)]
    slope, inter = fit_power_law([(n, 3 * n**-1.5) for n in ns])
    assert slope == pytest.approx(-1.5, abs=1e-9)
    assert inter == pytest.approx(math.log(3), abs=1e-8)
    slope, _ = fit_power_law([(n, (1 + 1 / n) / n) for n in ns])
    assert -1.1 < slope < -1.0
    with pytest.raises(ValueError):
        fit_power_law([(1, 1.0)] * 3)
    with pytest.raises(ValueError):
        fit_power_law([(n, -1.0) for n in ns])


def test_fit_high_temp_qn_residual(high_temp):
    from cwlo.series import qn_coeffs, ladder_sum

    c = qn_coeffs(high_temp, 0)
    samples = [(n, abs(qn_even_exact(high_temp, n).probability - ladder_sum(c, n))) for n in (2**k for k in range(8, 17))]
    slope, _ = fit_power_law(samples)
    assert slope == pytest.approx(-1.5, abs=0.15)
