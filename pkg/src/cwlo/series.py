"""Taylor data of the profile functions and the Laplace-method coefficient ladders.

Z, O and Q_n all expand in powers of n at fixed (d, beta, h).  The coefficients
come from Taylor data at the maximizer of the profile: the perturbation
exp(sum of higher Taylor terms) is expanded in the scale parameter, and each
monomial is integrated against the leading Gaussian (or quartic, at
criticality) weight.  The "sum over compositions" of the coefficients is
computed as the coefficient of x^N in B(x)^k for the perturbation series B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from cwlo.model import ModelParams, Regime, classify_regime, logcosh, solve_mean_field

__all__ = [
    "UniSeries",
    "BiSeries",
    "ExpansionCoeffs",
    "taylor_phi_at",
    "taylor_psi_at",
    "e_coeffs",
    "gamma_coeffs",
    "qn_coeffs",
    "qn_plus_asymptotic",
    "predict",
    "predict_log",
    "ladder_sum",
    "MAX_PHI_ORDER",
    "MAX_PSI_DEGREE",
    "MAX_E_ORDER",
    "MAX_GAMMA_ORDER",
]

MAX_PHI_ORDER = 24
MAX_PSI_DEGREE = 12
MAX_E_ORDER = 4
MAX_GAMMA_ORDER = 2


# ---------------------------------------------------------------- Taylor data


@dataclass(frozen=True)
class UniSeries:
    center: float
    coeffs: tuple[float, ...]

    def __getitem__(self, k):
        return self.coeffs[k] if k < len(self.coeffs) else 0.0

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(np.asarray(t) - self.center, self.coeffs)


@dataclass(frozen=True)
class BiSeries:
    center: tuple[float, float]
    coeffs: np.ndarray  # coeffs[p, q] multiplies (t - t0)^p u^q, zero above total degree

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def __getitem__(self, pq):
        p, q = pq
        D = self.degree
        return float(self.coeffs[p, q]) if p + q <= D else 0.0

    def __call__(self, t, u):
        return np.polynomial.polynomial.polyval2d(np.asarray(t) - self.center[0], np.asarray(u) - self.center[1], self.coeffs)


@lru_cache(maxsize=None)
def _logcosh_derivative_polys(order: int):
    """Integer polynomials P_k in u = tanh t with d^k/dt^k log cosh t = P_k(u)."""
    polys = [None, (0, 1)]
    for _ in range(2, order + 1):
        prev = polys[-1]
        der = [i * c for i, c in enumerate(prev)][1:] or [0]
        # multiply by (1 - u^2)
        out = [0] * (len(der) + 2)
        for i, c in enumerate(der):
            out[i] += c
            out[i + 2] -= c
        while len(out) > 1 and out[-1] == 0:
            out.pop()
        polys.append(tuple(out))
    return tuple(polys)


def taylor_phi_at(p: ModelParams, t0: float, order: int) -> UniSeries:
    """a_0..a_order of phi around t0."""
    if p.beta <= 0:
        raise ValueError("phi needs beta > 0")
    if order > MAX_PHI_ORDER:
        raise ValueError(f"order {order} exceeds the validated cap {MAX_PHI_ORDER}")
    if order < 0:
        raise ValueError("order must be non-negative")
    polys = _logcosh_derivative_polys(max(order, 1))
    u = Fraction(math.tanh(t0))
    a = [float(logcosh(t0))]
    for k in range(1, order + 1):
        val = sum(c * u**i for i, c in enumerate(polys[k]))
        a.append(float(val / math.factorial(k)))
    K4 = 4.0 * p.coupling
    off = t0 - p.abs_h
    a[0] -= off * off / K4
    if order >= 1:
        a[1] -= 2.0 * off / K4
    if order >= 2:
        a[2] -= 1.0 / K4
    return UniSeries(float(t0), tuple(a))


def _bi_mul(a, b, D):
    out = np.zeros((D + 1, D + 1))
    for i, j in zip(*np.nonzero(a)):
        for k, l in zip(*np.nonzero(b)):
            if i + j + k + l <= D:
                out[i + k, j + l] += a[i, j] * b[k, l]
    return out


def _log_part_series(t0: float, D: int) -> np.ndarray:
    """Taylor coefficients of log(sinh^2 t + cos^2(u/2)) / 2 - log cosh t0 around (t0, 0)."""
    sech2 = 1.0 / math.cosh(t0) ** 2 if abs(t0) < 350 else 0.0
    th = math.tanh(t0)
    w = np.zeros((D + 1, D + 1))
    for j in range(1, D + 1):
        c = 2.0**j / math.factorial(j)
        # cosh(2 tau) - 1 has the even powers, sinh(2 tau) the odd ones
        w[j, 0] = (1.0 - 0.5 * sech2) * c if j % 2 == 0 else th * c
        if j % 2 == 0:
            w[0, j] = 0.5 * sech2 * (-1) ** (j // 2) / math.factorial(j)
    out = np.zeros_like(w)
    power = np.zeros_like(w)
    power[0, 0] = 1.0
    for j in range(1, D + 1):
        power = _bi_mul(power, w, D)
        if not power.any():
            break
        out += ((-1) ** (j + 1) / j) * power
    return 0.5 * out


def taylor_psi_at(p: ModelParams, t0: float, total_degree: int) -> BiSeries:
    """alpha_{p,q} of psi around (t0, 0), dense up to the given total degree."""
    if p.beta <= 0:
        raise ValueError("psi needs beta > 0")
    if total_degree > MAX_PSI_DEGREE:
        raise ValueError(f"total degree {total_degree} exceeds the validated cap {MAX_PSI_DEGREE}")
    D = int(total_degree)
    c = _log_part_series(t0, D)
    K4 = 4.0 * p.coupling
    off = t0 - p.abs_h
    c[0, 0] += float(logcosh(t0)) - off * off / K4
    if D >= 1:
        c[1, 0] -= 2.0 * off / K4
    if D >= 2:
        c[2, 0] -= 1.0 / K4
    return BiSeries((float(t0), 0.0), c)


# ---------------------------------------------------------------- coefficient ladders


@dataclass(frozen=True)
class ExpansionCoeffs:
    """values[i] * n**powers[i], summed, times 2^n e^{n*log_growth} for Z and O."""

    regime: Regime
    kind: str  # "Z", "O", "Qn" or "QnPlus"
    log_growth: float  # phi(t_*); the n*ln 2 part is applied separately
    powers: tuple[Fraction, ...]
    values: tuple[float, ...]

    @property
    def prefactor_log(self) -> float:
        """Per-spin exponential rate ln 2 + phi(t_*) (zero for ratios)."""
        return math.log(2.0) + self.log_growth if self.kind in ("Z", "O") else 0.0

    def to_json(self) -> dict:
        return {
            "regime": self.regime.value,
            "kind": self.kind,
            "log_growth": self.log_growth,
            "powers": [f"{q.numerator}/{q.denominator}" for q in self.powers],
            "values": list(self.values),
        }

    def truncated(self, M: int) -> "ExpansionCoeffs":
        return ExpansionCoeffs(self.regime, self.kind, self.log_growth, self.powers[: M + 1], self.values[: M + 1])


def _check_order(M, cap, what):
    if M < 0:
        raise ValueError("M must be non-negative")
    if M > cap:
        raise ValueError(f"{what} is only validated up to M = {cap}, got {M}")


def _composition_sums(b: list[float], N: int, kmax: int) -> list[float]:
    """[x^N] B(x)^k for k = 0..kmax, where B(x) = sum_{m>=1} b[m] x^m."""
    B = np.zeros(N + 1)
    B[1 : min(len(b), N + 1)] = b[1 : N + 1]
    out = [1.0 if N == 0 else 0.0]
    power = np.zeros(N + 1)
    power[0] = 1.0
    for _ in range(kmax):
        power = np.convolve(power, B)[: N + 1]
        out.append(float(power[N]))
    return out


def _double_factorial(k: int) -> int:
    return math.prod(range(k, 0, -2)) if k > 0 else 1


@lru_cache(maxsize=256)
def _mf(p: ModelParams):
    return solve_mean_field(p)


def _log_growth(p: ModelParams, reg: Regime) -> float:
    if reg in (Regime.HIGH_TEMP, Regime.CRITICAL):
        return 0.0
    sol = _mf(p)
    return float(logcosh(sol.t_star)) - p.coupling * sol.z_star**2


def e_coeffs(p: ModelParams, M: int) -> ExpansionCoeffs:
    """Partition-function ladder: Z = 2^n e^{n phi(t_*)} sum_p e_p n^{-power_p}."""
    _check_order(M, MAX_E_ORDER, "e_coeffs")
    reg = classify_regime(p)
    if reg == Regime.CRITICAL:
        powers = tuple(Fraction(1, 4) - Fraction(k, 2) for k in range(M + 1))
    else:
        powers = tuple(Fraction(-k) for k in range(M + 1))
    growth = _log_growth(p, reg)
    if p.beta == 0:
        vals = [1.0] + [0.0] * M
        return ExpansionCoeffs(reg, "Z", growth, powers, tuple(vals))

    Kb = 2.0 * p.coupling
    vals = []
    if reg == Regime.HIGH_TEMP:
        a = taylor_phi_at(p, 0.0, 2 * M + 2)
        vals.append((1.0 - Kb) ** -0.5)
        for q in range(1, M + 1):
            c = _composition_sums([0.0] + [a[2 * (m + 1)] for m in range(1, q + 1)], q, q)
            vals.append(
                sum(
                    _double_factorial(2 * q + 2 * k - 1) * Kb ** (q + k) * (1.0 - Kb) ** (-(2 * q + 2 * k + 1) / 2)
                    / math.factorial(k) * c[k]
                    for k in range(1, q + 1)
                )
            )
    elif reg == Regime.CRITICAL:
        a = taylor_phi_at(p, 0.0, 2 * M + 4)
        pref = (0.75**0.25) / math.sqrt(2.0 * math.pi)
        vals.append(pref * math.gamma(0.25))
        for q in range(1, M + 1):
            c = _composition_sums([0.0] + [a[2 * m + 4] for m in range(1, q + 1)], q, q)
            vals.append(
                pref
                * sum(12.0 ** (q / 2 + k) * math.gamma(q / 2 + k + 0.25) / math.factorial(k) * c[k] for k in range(1, q + 1))
            )
    else:
        sol = _mf(p)
        a = taylor_phi_at(p, sol.t_star, 2 * M + 2)
        a2 = a[2]
        lead = (-p.coupling * a2) ** -0.5 if reg == Regime.LOW_TEMP else (-4.0 * p.coupling * a2) ** -0.5
        vals.append(lead)
        for q in range(1, M + 1):
            c = _composition_sums([0.0] + [a[m + 2] for m in range(1, 2 * q + 1)], 2 * q, 2 * q)
            vals.append(
                lead
                * sum(
                    _double_factorial(2 * q + 2 * k - 1) / math.factorial(k) * (-2.0 * a2) ** (-(q + k)) * c[k]
                    for k in range(1, 2 * q + 1)
                )
            )
    return ExpansionCoeffs(reg, "Z", growth, powers, tuple(vals))


def _bi_power_sums(terms: dict, order: int, kmax: int):
    """For each k <= kmax, the monomials of the x^order part of B^k.

    terms maps (s_pow, v_pow, x_pow) -> coefficient; returns a list indexed by k
    of dicts (S, V) -> summed coefficient.  This is the sum over ordered
    sequences of index pairs.
    """
    out = []
    layer = {(0, 0, 0): 1.0}
    for _ in range(kmax):
        nxt = {}
        for (s1, v1, x1), c1 in layer.items():
            for (s2, v2, x2), c2 in terms.items():
                if x1 + x2 <= order:
                    key = (s1 + s2, v1 + v2, x1 + x2)
                    nxt[key] = nxt.get(key, 0.0) + c1 * c2
        layer = nxt
        acc = {}
        for (s, v, x), c in layer.items():
            if x == order:
                acc[(s, v)] = acc.get((s, v), 0.0) + c
        out.append(acc)
    return out


def _gaussian_gamma(alpha: BiSeries | None, a20: float, a02: float, q: int, t_direction: bool) -> float:
    """sum_k 1/k! sum over sequences, times Gaussian moments; prefactor applied by caller."""
    D = 2 * q + 2
    terms = {}
    for i in range(D + 1):
        for j in range(D + 1 - i):
            if i + j < 3:
                continue
            if not t_direction and i > 0:
                continue
            c = alpha[i, j]
            if c != 0.0:
                terms[(i, j, i + j - 2)] = c
    total = 0.0
    if q == 0:
        sums = [{(0, 0): 1.0}]
        ks = [0]
    else:
        sums = _bi_power_sums(terms, 2 * q, 2 * q)
        ks = range(1, 2 * q + 1)
    for k in ks:
        acc = sums[0] if q == 0 else sums[k - 1]
        for (P, Q), c in acc.items():
            if P % 2 or Q % 2:
                continue
            w = (-a02) ** (-(Q + 1) / 2) * math.gamma((Q + 1) / 2)
            if t_direction:
                w *= (-a20) ** (-(P + 1) / 2) * math.gamma((P + 1) / 2)
            total += c * w / math.factorial(k)
    return total


def gamma_coeffs(p: ModelParams, M: int) -> ExpansionCoeffs:
    """Balance-event ladder: O = 2^n e^{n phi(t_*)} sum_p gamma_p n^{-power_p}."""
    _check_order(M, MAX_GAMMA_ORDER, "gamma_coeffs")
    reg = classify_regime(p)
    growth = _log_growth(p, reg)
    if reg == Regime.CRITICAL:
        powers = tuple(-Fraction(1, 4) - Fraction(k, 2) for k in range(M + 1))
        alpha = taylor_psi_at(p, 0.0, 2 * M + 6)
        terms = {}
        for i in range(0, M + 3):
            for j in range(0, (M + 2) // 2 + 1):
                if i + 2 * j >= 3 and i + 2 * j - 2 <= M:
                    c = alpha[2 * i, 2 * j]
                    if c != 0.0:
                        terms[(i, j, i + 2 * j - 2)] = c
        vals = []
        pref = 1.0 / (2.0 * math.pi) ** 1.5

        def weight(P, Q):
            return 3.0 ** (P / 2 + 0.25) * 2.0 ** (P + 3 * Q + 1) * math.gamma(P / 2 + 0.25) * math.gamma(Q + 0.5)

        vals.append(pref * weight(0, 0))
        for q in range(1, M + 1):
            sums = _bi_power_sums(terms, q, q)
            vals.append(
                pref * sum(c * weight(P, Q) / math.factorial(k) for k in range(1, q + 1) for (P, Q), c in sums[k - 1].items())
            )
        return ExpansionCoeffs(reg, "O", growth, powers, tuple(vals))

    powers = tuple(-Fraction(1, 2) - k for k in range(M + 1))
    if p.beta == 0:
        # the t-direction collapses to a point mass; only the u-integral survives
        alpha = BiSeries((p.abs_h, 0.0), _log_part_series(p.abs_h, 2 * M + 6))
        a02 = alpha[0, 2]
        vals = [_gaussian_gamma(alpha, -1.0, a02, q, False) / (2.0 * math.pi) for q in range(M + 1)]
        return ExpansionCoeffs(reg, "O", growth, powers, tuple(vals))

    t_star = _mf(p).t_star
    alpha = taylor_psi_at(p, t_star, 2 * M + 6)
    a20, a02 = alpha[2, 0], alpha[0, 2]
    pref = 1.0 / ((2.0 * math.pi) ** 1.5 * math.sqrt(2.0 * p.coupling))
    if reg == Regime.LOW_TEMP:
        pref *= 2.0
    vals = [pref * _gaussian_gamma(alpha, a20, a02, q, True) for q in range(M + 1)]
    return ExpansionCoeffs(reg, "O", growth, powers, tuple(vals))


def qn_coeffs(p: ModelParams, M: int) -> ExpansionCoeffs:
    """Q_n = O/Z ladder, by formal division of the gamma ladder by the e ladder."""
    _check_order(M, MAX_GAMMA_ORDER, "qn_coeffs")
    e = e_coeffs(p, M).values
    g = gamma_coeffs(p, M).values
    if e[0] == 0:
        raise ZeroDivisionError("leading partition coefficient vanished")
    H = []
    for k in range(M + 1):
        H.append((g[k] - sum(e[j] * H[k - j] for j in range(1, k + 1))) / e[0])
    reg = classify_regime(p)
    if reg == Regime.CRITICAL:
        powers = tuple(-Fraction(1, 2) - Fraction(k, 2) for k in range(M + 1))
    else:
        powers = tuple(-Fraction(1, 2) - k for k in range(M + 1))
    return ExpansionCoeffs(reg, "Qn", 0.0, powers, tuple(H))


def qn_plus_asymptotic(p: ModelParams):
    """(constant, exponent) of the leading Q_n^+ asymptotics."""
    reg = classify_regime(p)
    Kb = 2.0 * p.coupling
    if reg == Regime.HIGH_TEMP:
        return math.sqrt(2.0 * (1.0 - Kb) / math.pi), Fraction(-1, 2)
    if reg == Regime.CRITICAL:
        return 2.0 / (0.75**0.25 * math.gamma(0.25)), Fraction(-3, 4)
    z = _mf(p).z_star
    inv = 1.0 / (1.0 - z * z) - Kb
    if reg == Regime.LOW_TEMP:
        return math.sqrt(inv / (2.0 * math.pi)), Fraction(-1, 2)
    return math.sqrt(2.0 * inv / math.pi), Fraction(-1, 2)


def qn_plus_coeffs(p: ModelParams) -> ExpansionCoeffs:
    c, e = qn_plus_asymptotic(p)
    return ExpansionCoeffs(classify_regime(p), "QnPlus", 0.0, (e,), (c,))


def ladder_sum(coeffs: ExpansionCoeffs, n: int) -> float:
    """sum_i values[i] * n**powers[i], without the exponential prefactor."""
    return float(sum(v * float(n) ** float(q) for v, q in zip(coeffs.values, coeffs.powers)))


def predict_log(p: ModelParams, n: int, coeffs: ExpansionCoeffs) -> float:
    s = ladder_sum(coeffs, n)
    if coeffs.kind in ("Z", "O"):
        return n * (math.log(2.0) + coeffs.log_growth) + math.log(s)
    return math.log(s)


def predict(p: ModelParams, n: int, coeffs: ExpansionCoeffs) -> float:
    """Evaluate the truncated ladder at n (inf when 2^n overflows)."""
    if n < 1:
        raise ValueError("n must be positive")
    s = ladder_sum(coeffs, n)
    if coeffs.kind in ("Z", "O"):
        try:
            return math.ldexp(math.exp(n * coeffs.log_growth) * s, int(n))
        except OverflowError:
            return math.inf
    return s
