"""Self-check suites: each compares library output against an independent oracle."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction


from cwlo import exact, series
from cwlo.model import ModelParams, Regime, free_energy, phi, solve_mean_field
from cwlo.oracle import (
    brute_force_qn,
    noncrossing_bruteforce,
    parallel_shift_max,
    quad_W,
    quad_W_odd,
    quad_Z_of_x,
)

__all__ = ["Case", "VerifyReport", "SUITES", "run_suite", "REGIME_POINTS", "random_unimodal", "binomial_row"]

# one test point per phase
REGIME_POINTS = {
    Regime.HIGH_TEMP: ModelParams(1, 0.3, 0.0),
    Regime.CRITICAL: ModelParams(1, 0.5, 0.0),
    Regime.LOW_TEMP: ModelParams(1, 1.0, 0.0),
    Regime.FIELD: ModelParams(1, 0.3, 0.2),
}

GRAPH_SEED = 20240611


@dataclass
class Case:
    description: str
    expected: float
    actual: float
    tolerance: float
    passed: bool

    def to_json(self):
        return {
            "description": self.description,
            "expected": self.expected,
            "actual": self.actual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass
class VerifyReport:
    suite: str
    cases: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def add(self, description, expected, actual, tolerance, relative=False, upper_only=False):
        expected, actual = float(expected), float(actual)
        if upper_only:
            ok = actual <= expected + tolerance
        else:
            err = abs(actual - expected)
            if relative:
                err /= max(abs(expected), 1e-300)
            ok = err <= tolerance
        self.cases.append(Case(description, expected, actual, tolerance, bool(ok)))

    def to_json(self):
        return {"suite": self.suite, "pass": self.passed, "cases": [c.to_json() for c in self.cases]}

    def summary(self) -> str:
        good = sum(c.passed for c in self.cases)
        return f"{self.suite}: {good}/{len(self.cases)} cases pass"


def _label(p: ModelParams) -> str:
    return f"d={p.d} beta={p.beta} h={p.h}"


def suite_meanfield() -> VerifyReport:
    rep = VerifyReport("meanfield")
    for d in (1, 2, 3):
        for beta in (0.1, 0.25, 0.5, 1.0, 2.0):
            for h in (-0.5, 0.0, 0.1, 0.7):
                p = ModelParams(d, beta, h)
                sol = solve_mean_field(p)
                lhs = -float(free_energy(p, sol.z_star))
                rhs = math.log(2.0) + float(phi(p, sol.t_star))
                rep.add(f"free energy identity {_label(p)}", rhs, lhs, 1e-12)
                fixed = math.tanh(2 * p.coupling * sol.z_star + abs(h))
                rep.add(f"fixed point {_label(p)}", sol.z_star, fixed, 1e-12)
    return rep


def suite_quadrature(ns=(50, 200, 1000)) -> VerifyReport:
    rep = VerifyReport("quadrature")
    for reg, p in REGIME_POINTS.items():
        for n in ns:
            x = 1.0 / math.sqrt(n)
            lz = n * math.log(2) + quad_Z_of_x(p, x)
            rep.add(f"Z {reg.value} n={n}", 1.0, math.exp(lz - exact.log_partition(p, n).log_value), 1e-6)
            lw = n * math.log(2) + quad_W(p, x)
            rep.add(f"W {reg.value} n={n}", 1.0, math.exp(lw - exact.log_O_even(p, n).log_value), 1e-6)
            m = n + 1
            lo = m * math.log(2) + quad_W_odd(p, 1.0 / math.sqrt(m))
            rep.add(f"W_odd {reg.value} n={m}", 1.0, math.exp(lo - exact.log_O_odd(p, m).log_value), 1e-6)
    return rep


def suite_coefficients() -> VerifyReport:
    rep = VerifyReport("coefficients")
    G = math.gamma
    pc = REGIME_POINTS[Regime.CRITICAL]
    a = series.taylor_phi_at(pc, 0.0, 8)
    rep.add("critical a_4", -1 / 12, a[4], 1e-15)
    rep.add("critical a_6", 1 / 45, a[6], 1e-15)
    al = series.taylor_psi_at(pc, 0.0, 8)
    rep.add("critical alpha_{0,2}", -1 / 8, al[0, 2], 1e-15)
    rep.add("critical alpha_{2,2}", 1 / 8, al[2, 2], 1e-15)
    rep.add("critical alpha_{6,0}", 1 / 45, al[6, 0], 1e-15)
    e = series.e_coeffs(pc, 1).values
    rep.add("critical e_0", 0.75**0.25 * G(0.25) / math.sqrt(2 * math.pi), e[0], 1e-13, relative=True)
    rep.add("critical e_1", 3**0.75 * G(0.75) / (5 * math.sqrt(math.pi)), e[1], 1e-13, relative=True)
    g = series.gamma_coeffs(pc, 1).values
    rep.add("critical gamma_0", 0.75**0.25 * G(0.25) / math.pi, g[0], 1e-13, relative=True)
    rep.add("critical gamma_1", 7 * 3**0.75 * G(0.75) / (5 * math.sqrt(2) * math.pi), g[1], 1e-13, relative=True)
    H = series.qn_coeffs(pc, 1).values
    rep.add("critical H_1", 2 * math.sqrt(3 * math.pi) / G(0.25) ** 2, H[1], 1e-13, relative=True)
    for reg, p in REGIME_POINTS.items():
        sol = solve_mean_field(p)
        H = series.qn_coeffs(p, 0).values
        rep.add(f"H_0 {reg.value}", math.sqrt(2 / math.pi) * math.cosh(sol.t_star), H[0], 1e-13, relative=True)
        if reg == Regime.CRITICAL:
            continue
        Kb = 2 * p.coupling
        ch2 = math.cosh(sol.t_star) ** 2
        e0 = series.e_coeffs(p, 0).values[0]
        if reg == Regime.HIGH_TEMP:
            rep.add("high-temperature e_0", (1 - Kb) ** -0.5, e0, 1e-13, relative=True)
        elif reg == Regime.LOW_TEMP:
            ref = math.sqrt(2) * p.coupling**-0.5 * (1 / Kb - 1 / ch2) ** -0.5
            rep.add("low-temperature e_0", ref, e0, 1e-12, relative=True)
        else:
            rep.add("field e_0", (1 - Kb * (1 - sol.z_star**2)) ** -0.5, e0, 1e-12, relative=True)
        g0 = series.gamma_coeffs(p, 0).values[0]
        ref = math.sqrt(2 / math.pi) * Kb**-0.5 * (1 / Kb - 1 / ch2) ** -0.5 * math.cosh(sol.t_star)
        if reg == Regime.LOW_TEMP:
            ref *= 2
        rep.add(f"gamma_0 {reg.value}", ref, g0, 1e-12, relative=True)
        uni = series.taylor_phi_at(p, sol.t_star, 10)
        bi = series.taylor_psi_at(p, sol.t_star, 10)
        worst = max(abs(uni[k] - bi[k, 0]) for k in range(11))
        rep.add(f"slice psi(t,0) = phi(t) {reg.value}", 0.0, worst, 1e-12)
    return rep


def suite_mixture() -> VerifyReport:
    rep = VerifyReport("mixture")
    for h in (0.0, 0.4):
        p = ModelParams(1, 0.3, h)
        for n in (8, 12, 20):
            rep.add(f"mixture Q_n h={h} n={n}", exact.qn_even_exact(p, n).probability, exact.qn_even_via_mixture(p, n), 1e-8)
            rep.add(f"mixing law mass h={h} n={n}", 1.0, exact.nu_total_mass(p, n), 1e-8)
    return rep


def random_unimodal(rng: random.Random, size: int, top: int = 20):
    """Integer unimodal row: an increasing run then a decreasing one."""
    vals = [rng.randint(0, top) for _ in range(size)]
    peak = rng.randint(0, size - 1)
    return tuple(sorted(vals[: peak + 1]) + sorted(vals[peak + 1 :], reverse=True))


def binomial_row(size: int, prob: Fraction):
    q = 1 - prob
    return tuple(math.comb(size, k) * prob**k * q ** (size - k) for k in range(size + 1))


def suite_graphs(trials: int = 200, seed: int = GRAPH_SEED) -> VerifyReport:
    rep = VerifyReport("graphs")
    rng = random.Random(seed)
    for i in range(trials):
        f = random_unimodal(rng, rng.randint(1, 7))
        g = random_unimodal(rng, rng.randint(1, 7))
        par, _ = parallel_shift_max(f, g)
        nc = noncrossing_bruteforce(f, g)
        rep.cases.append(Case(f"random pair {i}", float(par), float(nc), 0.0, par == nc))
    for j in range(1, 10):
        prob = Fraction(j, 10)
        for a in range(0, 8):
            for b in range(0, 8):
                f, g = binomial_row(a, prob), binomial_row(b, prob)
                par, _ = parallel_shift_max(f, g)
                nc = noncrossing_bruteforce(f, g)
                rep.cases.append(Case(f"binomial p={prob} sizes {a},{b}", float(par), float(nc), 0.0, par == nc))
    return rep


def suite_bruteforce(nmax: int = 12, grid=(1.0, 1.25, 1.5, 2.0), points=None) -> VerifyReport:
    """Grid search never beats the all-ones / balanced vectors (consistency, not proof)."""
    rep = VerifyReport("bruteforce")
    for p in points or REGIME_POINTS.values():
        for n in range(1, nmax + 1):
            best, _ = brute_force_qn(p, n, grid, signs=False)
            rep.add(f"Q_n^+ attainment {_label(p)} n={n}", exact.qn_plus_exact(p, n).probability, best, 1e-12, upper_only=True)
            best, _ = brute_force_qn(p, n, grid, signs=True)
            if n % 2 == 0:
                rep.add(f"Q_n attainment {_label(p)} n={n}", exact.qn_even_exact(p, n).probability, best, 1e-12, upper_only=True)
            else:
                lo, hi = exact.qn_bounds(p, n)
                rep.add(f"odd-n upper bound {_label(p)} n={n}", hi, best, 1e-12, upper_only=True)
                rep.cases.append(Case(f"odd-n lower bound {_label(p)} n={n}", lo, best, 1e-12, best >= lo - 1e-12))
    return rep


SUITES = {
    "meanfield": suite_meanfield,
    "quadrature": suite_quadrature,
    "coefficients": suite_coefficients,
    "mixture": suite_mixture,
    "graphs": suite_graphs,
    "bruteforce": suite_bruteforce,
}


def run_suite(name: str) -> list[VerifyReport]:
    if name == "all":
        return [fn() for fn in SUITES.values()]
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    return [SUITES[name]()]
