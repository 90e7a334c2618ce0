import json
import math
from fractions import Fraction

import pytest

from cwlo.exact import qn_even_exact
from cwlo.model import ModelParams, Regime, solve_mean_field
from cwlo.series import (
    MAX_E_ORDER,
    MAX_GAMMA_ORDER,
    e_coeffs,
    gamma_coeffs,
    ladder_sum,
    predict,
    predict_log,
    qn_coeffs,
    qn_plus_asymptotic,
    qn_plus_coeffs,
    taylor_phi_at,
    taylor_psi_at,
)

G = math.gamma
SQ2PI = math.sqrt(2 / math.pi)
H1_CRIT = 2 * math.sqrt(3 * math.pi) / G(0.25) ** 2
ZSTAR_BETA1 = 0.95750402407726874068


def test_critical_phi_taylor(critical):
    a = taylor_phi_at(critical, 0.0, 8)
    assert a[2] == pytest.approx(0.0, abs=1e-15)
    assert a[4] == pytest.approx(-1 / 12, abs=1e-15)
    assert a[6] == pytest.approx(1 / 45, abs=1e-15)
    assert a[1] == a[3] == a[5] == 0.0


def test_phi_taylor_at_low_temp_maximum(low_temp):
    sol = solve_mean_field(low_temp)
    a = taylor_phi_at(low_temp, sol.t_star, 6)
    assert abs(a[1]) <= 1e-10
    assert 2 * a[2] == pytest.approx(1 / math.cosh(sol.t_star) ** 2 - 1 / (2 * low_temp.coupling), abs=1e-13)
    assert a[2] < 0


def test_phi_taylor_evaluates_near_center(field):
    from cwlo.model import phi

    a = taylor_phi_at(field, 0.4, 20)
    assert a(0.45) == pytest.approx(phi(field, 0.45), abs=1e-14)


def test_critical_psi_taylor(critical):
    al = taylor_psi_at(critical, 0.0, 8)
    assert al[0, 2] == pytest.approx(-1 / 8, abs=1e-15)
    assert al[4, 0] == pytest.approx(-1 / 12, abs=1e-15)
    assert al[2, 2] == pytest.approx(1 / 8, abs=1e-15)
    assert al[6, 0] == pytest.approx(1 / 45, abs=1e-15)


@pytest.mark.parametrize("name", ["high_temp", "low_temp", "field"])
def test_psi_taylor_noncritical(name, request):
    p = request.getfixturevalue(name)
    t = solve_mean_field(p).t_star
    al = taylor_psi_at(p, t, 6)
    ch2 = math.cosh(t) ** 2
    assert al[1, 1] == pytest.approx(0.0, abs=1e-14)
    assert 2 * al[0, 2] == pytest.approx(-1 / (4 * ch2), abs=1e-14)
    assert 2 * al[2, 0] == pytest.approx(1 / ch2 - 1 / (2 * p.coupling), abs=1e-13)


def test_psi_taylor_evaluates_near_center(field):
    from cwlo.model import psi

    al = taylor_psi_at(field, 0.4, 12)
    assert al(0.43, 0.05) == pytest.approx(psi(field, 0.43, 0.05), abs=1e-13)


def test_e0_closed_forms(high_temp, critical, field):
    assert e_coeffs(high_temp, 0).values[0] == pytest.approx((1 - 0.6) ** -0.5, rel=1e-14)
    e = e_coeffs(critical, 1).values
    assert e[0] == pytest.approx(0.75**0.25 * G(0.25) / math.sqrt(2 * math.pi), rel=1e-13)
    assert e[1] == pytest.approx(3**0.75 * G(0.75) / (5 * math.sqrt(math.pi)), rel=1e-13)
    z = solve_mean_field(field).z_star
    assert e_coeffs(field, 0).values[0] == pytest.approx((1 - 0.6 * (1 - z * z)) ** -0.5, rel=1e-12)


def test_e_ladder_frozen_critical(critical):
    # values frozen after cross-checking against exact partition sums up to n = 2^16
    ref = (1.346035322408031, 0.3151953456562555, -0.0048072690086001565, -0.013133139402343839, 0.007158304498098912)
    assert e_coeffs(critical, 4).values == pytest.approx(ref, rel=1e-12)


def test_gamma_closed_forms(high_temp, critical, low_temp, field):
    assert gamma_coeffs(high_temp, 0).values[0] == pytest.approx(SQ2PI / math.sqrt(0.4), rel=1e-13)
    g = gamma_coeffs(critical, 1).values
    assert g[0] == pytest.approx(0.75**0.25 * G(0.25) / math.pi, rel=1e-13)
    assert g[1] == pytest.approx(7 * 3**0.75 * G(0.75) / (5 * math.sqrt(2) * math.pi), rel=1e-13)
    t = solve_mean_field(low_temp).t_star
    Kb = 2 * low_temp.coupling
    ref = 2 * SQ2PI * Kb**-0.5 * (1 / Kb - 1 / math.cosh(t) ** 2) ** -0.5 * math.cosh(t)
    assert gamma_coeffs(low_temp, 0).values[0] == pytest.approx(ref, rel=1e-12)


def test_qn_leading_constants(high_temp, critical, low_temp, field):
    assert qn_coeffs(high_temp, 0).values[0] == pytest.approx(SQ2PI, rel=1e-13)
    H = qn_coeffs(critical, 1).values
    assert H[0] == pytest.approx(SQ2PI, rel=1e-13)
    assert H[1] == pytest.approx(H1_CRIT, rel=1e-13)
    for p in (low_temp, field):
        t = solve_mean_field(p).t_star
        assert qn_coeffs(p, 0).values[0] == pytest.approx(SQ2PI * math.cosh(t), rel=1e-12)


def test_qn_plus_asymptotic(high_temp, critical, low_temp):
    c, e = qn_plus_asymptotic(high_temp)
    assert c == pytest.approx(math.sqrt(0.8 / math.pi)) and e == Fraction(-1, 2)
    c, e = qn_plus_asymptotic(critical)
    assert c == pytest.approx(2 / (0.75**0.25 * G(0.25))) and e == Fraction(-3, 4)
    c, _ = qn_plus_asymptotic(low_temp)
    assert c == pytest.approx(math.sqrt((1 / (1 - ZSTAR_BETA1**2) - 2) / (2 * math.pi)), rel=1e-12)
    assert qn_plus_coeffs(high_temp).kind == "QnPlus"


def test_powers_are_rational_and_decreasing(critical, field):
    for c in (e_coeffs(critical, 4), gamma_coeffs(critical, 2), qn_coeffs(field, 2), e_coeffs(field, 4)):
        assert all(isinstance(q, Fraction) for q in c.powers)
        assert all(a > b for a, b in zip(c.powers, c.powers[1:]))
    assert e_coeffs(critical, 2).powers == (Fraction(1, 4), Fraction(-1, 4), Fraction(-3, 4))


def test_order_caps(high_temp):
    with pytest.raises(ValueError):
        e_coeffs(high_temp, MAX_E_ORDER + 1)
    with pytest.raises(ValueError):
        gamma_coeffs(high_temp, MAX_GAMMA_ORDER + 1)
    with pytest.raises(ValueError):
        qn_coeffs(high_temp, -1)


def test_json_export(critical):
    doc = json.loads(json.dumps(e_coeffs(critical, 1).to_json()))
    assert doc["powers"] == ["1/4", "-1/4"]
    assert doc["regime"] == "Critical" and doc["kind"] == "Z"


def test_predict_examples(high_temp, critical):
    assert predict(high_temp, 10**4, qn_coeffs(high_temp, 0)) == pytest.approx(SQ2PI * 1e-2, rel=1e-14)
    p0 = ModelParams(1, 0.0, 0.0)
    z = e_coeffs(p0, 3)
    for n in (1, 7, 50):
        assert predict(p0, n, z) == 2.0**n
    assert predict(p0, 5000, z) == math.inf
    assert predict_log(p0, 5000, z) == pytest.approx(5000 * math.log(2))
    n = 10**6
    got = predict(critical, n, qn_coeffs(critical, 1))
    assert got == pytest.approx(SQ2PI * 1e-3 + H1_CRIT * 1e-6, rel=1e-14)
    assert got == pytest.approx(qn_even_exact(critical, n).probability, rel=1e-6)


def test_ladder_sum_truncation(field):
    c = qn_coeffs(field, 2)
    assert ladder_sum(c.truncated(0), 100) == pytest.approx(c.values[0] / 10)
    assert len(c.truncated(1).values) == 2


def test_zero_beta_ladders():
    p = ModelParams(1, 0.0, 0.0)
    assert e_coeffs(p, 2).values == (1.0, 0.0, 0.0)
    assert gamma_coeffs(p, 0).values[0] == pytest.approx(SQ2PI)
