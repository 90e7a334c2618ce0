"""Curie-Weiss model parameters, phase classification and scalar profile functions.

The model on n spins assigns a configuration sigma the weight
exp((d*beta/n) * S**2 + h*S) with S the total spin.  Everything downstream is
symmetric in h, so the profile functions below are written in terms of |h|.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "ModelParams",
    "Regime",
    "MeanFieldSolution",
    "SolverError",
    "beta_critical",
    "classify_regime",
    "logcosh",
    "phi",
    "psi",
    "rho",
    "entropy_density",
    "free_energy",
    "solve_mean_field",
    "locate_beta0",
]

REGIME_TOL = 1e-12


class SolverError(RuntimeError):
    """Raised when the mean-field root finder fails to converge."""


class Regime(enum.Enum):
    HIGH_TEMP = "HighTemp"
    CRITICAL = "Critical"
    LOW_TEMP = "LowTemp"
    FIELD = "Field"

    @classmethod
    def parse(cls, name: str) -> "Regime":
        for r in cls:
            if name.lower() in (r.value.lower(), r.name.lower()):
                return r
        raise ValueError(f"unknown regime {name!r}")


def beta_critical(d: int) -> float:
    """Critical inverse temperature 1/(2d)."""
    if d < 1:
        raise ValueError("d must be a positive integer")
    return float(Fraction(1, 2 * d))


@dataclass(frozen=True)
class ModelParams:
    d: int
    beta: float
    h: float = 0.0
    regime_override: Regime | None = field(default=None, compare=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d}")
        if not self.beta >= 0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")
        if not math.isfinite(self.h):
            raise ValueError("h must be finite")

    @property
    def beta_c(self) -> float:
        return beta_critical(self.d)

    @property
    def coupling(self) -> float:
        """d*beta, the coefficient of S**2/n in the energy."""
        return self.d * self.beta

    @property
    def abs_h(self) -> float:
        return abs(self.h)

    @property
    def regime(self) -> Regime:
        return classify_regime(self)

    def with_h(self, h: float) -> "ModelParams":
        return ModelParams(self.d, self.beta, h, self.regime_override)


def classify_regime(p: ModelParams, tol: float = REGIME_TOL) -> Regime:
    if p.regime_override is not None:
        return p.regime_override
    if tol < 0:
        raise ValueError("tol must be non-negative")
    if abs(p.h) > tol:
        return Regime.FIELD
    bc = p.beta_c
    if abs(p.beta - bc) <= tol * bc:
        return Regime.CRITICAL
    return Regime.HIGH_TEMP if p.beta < bc else Regime.LOW_TEMP


def _require_beta(p: ModelParams):
    if p.beta <= 0:
        raise ValueError("profile function undefined at beta = 0")


def logcosh(t):
    """log(cosh t) without overflow."""
    a = np.abs(t)
    return a + np.log1p(np.exp(-2.0 * a)) - math.log(2.0)


def phi(p: ModelParams, t):
    _require_beta(p)
    return logcosh(t) - (t - p.abs_h) ** 2 / (4.0 * p.coupling)


def _log_half_cosh_plus_cos(t, u):
    # log(cosh(2t)/2 + cos(u)/2) = log(sinh(t)**2 + cos(u/2)**2), scaled by e^{2|t|}
    a = np.abs(t)
    s = np.exp(-a)
    c = np.cos(0.5 * np.asarray(u, dtype=float))
    with np.errstate(divide="ignore"):
        return 2.0 * a + np.log((0.5 * (1.0 - s * s)) ** 2 + (s * c) ** 2)


def psi(p: ModelParams, t, u):
    """Two-variable profile; equals phi(t) on u = 0 and is -inf at (0, +-pi)."""
    _require_beta(p)
    return 0.5 * _log_half_cosh_plus_cos(t, u) - (t - p.abs_h) ** 2 / (4.0 * p.coupling)


def rho(t, u):
    """(e^-t + e^t cos u) / sqrt(2 cosh 2t + 2 cos u)."""
    t = np.asarray(t, dtype=float)
    u = np.asarray(u, dtype=float)
    a = np.abs(t)
    s = np.exp(-a)
    den = 2.0 * np.sqrt((0.5 * (1.0 - s * s)) ** 2 + (s * np.cos(0.5 * u)) ** 2)
    num = np.exp(-t - a) + np.exp(t - a) * np.cos(u)
    if np.any(den == 0):
        raise ValueError("rho is singular at t = 0, u = +-pi")
    out = num / den
    return out if out.ndim else float(out)


def entropy_density(m):
    m = np.asarray(m, dtype=float)
    if np.any(np.abs(m) > 1):
        raise ValueError("entropy density needs |m| <= 1")
    a = 0.5 * (1.0 + m)
    b = 0.5 * (1.0 - m)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -np.where(a > 0, a * np.log(a), 0.0) - np.where(b > 0, b * np.log(b), 0.0)
    return out if out.ndim else float(out)


def free_energy(p: ModelParams, m):
    """-d*beta*m^2 - |h|*m - s(m)."""
    return -p.coupling * np.asarray(m) ** 2 - p.abs_h * np.asarray(m) - entropy_density(m)


@dataclass(frozen=True)
class MeanFieldSolution:
    z_star: float
    t_star: float
    residual: float
    all_solutions: tuple[float, ...]
    # 2*d*beta*z + |h| for every root, same order as all_solutions
    tilts: tuple[float, ...] = field(default=(), repr=False, compare=False)


def _g(z, K, ah):
    return np.tanh(K * z + ah) - z


def _bisect(f, lo, hi, tol=1e-14, maxiter=200):
    flo = f(lo)
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= tol:
            return 0.5 * (lo + hi)
    raise SolverError(f"bisection did not converge on [{lo}, {hi}]")


def _polish(z, K, ah, lo, hi):
    # Newton steps, kept only while they stay inside the bracket and improve |g|
    for _ in range(4):
        g = _g(z, K, ah)
        dg = K / np.cosh(K * z + ah) ** 2 - 1.0
        if dg == 0:
            break
        zn = z - g / dg
        if not lo <= zn <= hi or abs(_g(zn, K, ah)) >= abs(g):
            break
        z = zn
    return float(z)


def solve_mean_field(p: ModelParams, tol: float = 1e-13, grid: int = 2048) -> MeanFieldSolution:
    """Roots of z = tanh(2*d*beta*z + |h|); z_star is the largest one."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    K = 2.0 * p.coupling
    ah = p.abs_h
    f = lambda z: _g(z, K, ah)  # noqa: E731

    if ah == 0 and K <= 1.0:
        return MeanFieldSolution(0.0, 0.0, 0.0, (0.0,), (0.0,))

    # bracket for the maximal root: g > 0 just right of the origin (or at 0 when h != 0)
    if ah == 0:
        lo = 0.5
        while f(lo) <= 0:
            lo *= 0.5
            if lo < 1e-300:
                raise SolverError(f"no positive root found for {p}")
    else:
        lo = 0.0
    z_star = _polish(_bisect(f, lo, 1.0), K, ah, lo, 1.0)

    roots = [z_star]
    if ah == 0:
        roots += [0.0, -z_star]
    else:
        zs = np.linspace(-1.0, 0.0, grid // 2 + 1)
        gs = f(zs)
        for i in range(len(zs) - 1):
            if gs[i] == 0:
                roots.append(float(zs[i]))
            elif gs[i] * gs[i + 1] < 0:
                r = _bisect(f, zs[i], zs[i + 1])
                roots.append(_polish(r, K, ah, zs[i], zs[i + 1]))
    roots = sorted(set(roots), reverse=True)
    res = max(abs(f(r)) for r in roots)
    if res > max(tol, 1e-15) * 10:
        raise SolverError(f"mean-field residual {res:.3e} above tolerance for {p}")
    t_star = K * z_star + ah
    tilts = tuple(K * r + ah for r in roots)
    return MeanFieldSolution(z_star, t_star, float(abs(f(z_star))), tuple(roots), tilts)


def locate_beta0(d: int, h: float, tol: float = 1e-10, beta_max: float = 100.0) -> float:
    """Smallest beta at which the mean-field equation with field h gains extra roots.

    Located by bisection on the number of roots; there is no closed form.
    """
    if h == 0:
        raise ValueError("beta_0 is only defined for h != 0")

    def count(beta):
        return len(solve_mean_field(ModelParams(d, beta, h), grid=1 << 16).all_solutions)

    lo, hi = beta_critical(d), beta_max
    if count(hi) == 1:
        raise SolverError(f"no extra roots below beta = {beta_max}")
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if count(mid) > 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
