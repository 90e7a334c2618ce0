"""Quadrature of the one- and two-dimensional integral representations of Z and O.

Z(x) = 1/(2 sqrt(pi d beta) x) * int exp(phi(t)/x^2) dt
W(x) = 1/((2 pi)^{3/2} sqrt(2 d beta) x) * int int_{(-pi, pi)} exp(psi(t,u)/x^2) du dt

with 2^n Z(1/sqrt n) = Z_{d,beta,h}, and 2^n W(1/sqrt n) the balance-event weight
(W_odd carries an extra factor rho(t,u)).  Everything is returned as logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from cwlo.model import ModelParams, phi, psi, rho, solve_mean_field
from cwlo.series import taylor_phi_at

__all__ = ["QuadConfig", "QuadratureError", "tanh_sinh", "quad_Z_of_x", "quad_W", "quad_W_odd"]

# integrand is treated as zero once it is this far (in log) below its peak
EDGE_DROP = 60.0


@dataclass(frozen=True)
class QuadConfig:
    abs_tol: float = 1e-15
    rel_tol: float = 1e-12
    max_subdivisions: int = 12  # number of step halvings of the tanh-sinh rule
    truncation_sigmas: float = 14.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1 or self.truncation_sigmas <= 0:
            raise ValueError("max_subdivisions and truncation_sigmas must be positive")


class QuadratureError(ArithmeticError):
    def __init__(self, msg, estimate):
        super().__init__(f"{msg} (estimate {estimate!r})")
        self.estimate = estimate


def _ts_nodes(step: float, tmax: float = 4.0):
    """Tanh-sinh abscissae and weights on (-1, 1); nodes that round onto an endpoint are dropped."""
    k = np.arange(0, int(tmax / step) + 1)
    tau = k * step
    s = 0.5 * math.pi * np.sinh(tau)
    dist = 2.0 / (np.exp(2.0 * s) + 1.0)  # 1 - tanh(s) without cancellation
    w = 0.5 * math.pi * np.cosh(tau) / np.cosh(s) ** 2 * step
    keep = dist > 0
    dist, w = dist[keep], w[keep]
    node = np.concatenate([-(1.0 - dist[:0:-1]), [0.0], 1.0 - dist[1:]])
    wts = np.concatenate([w[:0:-1], w[:1], w[1:]])
    return node, wts


def _map(a, b, step):
    node, w = _ts_nodes(step)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * node, half * w


def tanh_sinh(f, a: float, b: float, cfg: QuadConfig = QuadConfig()):
    """Integrate a vectorized f over [a, b]; step halved until successive levels agree."""
    prev = None
    step = 0.5
    for _ in range(cfg.max_subdivisions):
        x, w = _map(a, b, step)
        val = float(np.dot(w, f(x)))
        if prev is not None and abs(val - prev) <= max(cfg.abs_tol, cfg.rel_tol * abs(val)):
            return val
        prev = val
        step *= 0.5
    raise QuadratureError("tanh-sinh did not converge", prev)


def _tanh_sinh_2d(f, ta, tb, ua, ub, cfg: QuadConfig):
    prev = None
    step = 0.5
    for _ in range(cfg.max_subdivisions):
        t, wt = _map(ta, tb, step)
        u, wu = _map(ua, ub, step)
        vals = f(t[:, None], u[None, :])
        val = float(wt @ vals @ wu)
        if prev is not None and abs(val - prev) <= max(cfg.abs_tol, cfg.rel_tol * abs(val)):
            return val
        prev = val
        step *= 0.5
    raise QuadratureError("2D tanh-sinh did not converge", prev)


# ---------------------------------------------------------------- windows


def _peaks(p: ModelParams):
    """Local maxima of phi: the tilts of mean-field roots where phi is concave."""
    sol = solve_mean_field(p)
    tilts = list(sol.tilts)
    if p.abs_h == 0:
        tilts += [-t for t in tilts]
    peaks = []
    for t in sorted(set(tilts)):
        a = taylor_phi_at(p, t, 4)
        if a[2] < -1e-12 or (abs(a[2]) <= 1e-12 and a[4] < 0):
            peaks.append((t, a[2], a[4]))
    return peaks


def _t_windows(p: ModelParams, x: float, cfg: QuadConfig):
    peaks = _peaks(p)
    top = max(float(phi(p, t)) for t, _, _ in peaks)
    wins = []
    for t, a2, a4 in peaks:
        if a2 < -1e-12:
            r = cfg.truncation_sigmas * x / math.sqrt(-2.0 * a2)
        else:
            r = (cfg.truncation_sigmas**2 * x * x / -a4) ** 0.25
        lo, hi = t - r, t + r
        # widen until the integrand at the edges is negligible relative to the global peak
        while (phi(p, lo) - top) / x**2 > -EDGE_DROP:
            lo -= r
        while (phi(p, hi) - top) / x**2 > -EDGE_DROP:
            hi += r
        wins.append([lo, hi, t])
    wins.sort()
    merged = [wins[0]]
    for w in wins[1:]:
        if w[0] <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], w[1])
        else:
            merged.append(w)
    return top, [(lo, hi) for lo, hi, _ in merged]


def _check_x(p, x):
    if not x > 0:
        raise ValueError("x must be positive")
    if p.beta <= 0:
        raise ValueError("the integral representation needs beta > 0")


def quad_Z_of_x(p: ModelParams, x: float, cfg: QuadConfig = QuadConfig()) -> float:
    """log Z(x)."""
    _check_x(p, x)
    top, wins = _t_windows(p, x, cfg)
    x2 = x * x

    def f(t):
        return np.exp((phi(p, t) - top) / x2)

    total = sum(tanh_sinh(f, lo, hi, cfg) for lo, hi in wins)
    return top / x2 + math.log(total) - math.log(2.0 * math.sqrt(math.pi * p.coupling) * x)


def _u_radius(p, x, t, top, cfg):
    r = min(math.pi, cfg.truncation_sigmas * 2.0 * x * math.cosh(t))
    while r < math.pi and (psi(p, t, r) - top) / x**2 > -EDGE_DROP:
        r = min(math.pi, 2.0 * r)
    return r


def _quad_W_generic(p: ModelParams, x: float, cfg: QuadConfig, odd: bool) -> float:
    _check_x(p, x)
    top, wins = _t_windows(p, x, cfg)
    x2 = x * x

    def f(t, u):
        with np.errstate(divide="ignore"):
            out = np.exp((psi(p, t, u) - top) / x2)
        return out * rho(t, u) if odd else out

    total = 0.0
    for lo, hi in wins:
        # u-extent set by the parts of the window that carry weight
        ts = [tc for tc in np.linspace(lo, hi, 33) if (phi(p, tc) - top) / x2 > -EDGE_DROP]
        ru = max(_u_radius(p, x, tc, top, cfg) for tc in ts or [0.5 * (lo + hi)])
        total += _tanh_sinh_2d(f, lo, hi, -ru, ru, cfg)
    if total <= 0:
        raise QuadratureError("non-positive integral", total)
    pref = (2.0 * math.pi) ** 1.5 * math.sqrt(2.0 * p.coupling) * x
    return top / x2 + math.log(total) - math.log(pref)


def quad_W(p: ModelParams, x: float, cfg: QuadConfig = QuadConfig()) -> float:
    """log W(x); 2^n W(1/sqrt n) is the even-n balance-event weight."""
    return _quad_W_generic(p, x, cfg, odd=False)


def quad_W_odd(p: ModelParams, x: float, cfg: QuadConfig = QuadConfig()) -> float:
    """log W_odd(x); 2^n W_odd(1/sqrt n) is the odd-n balance-event weight."""
    return _quad_W_generic(p, x, cfg, odd=True)
