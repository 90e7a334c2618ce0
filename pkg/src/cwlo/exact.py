"""Exact finite-n sums for the Curie-Weiss model, in the log domain.

Every sum here has the shape sum_k mult(k) * exp((d*beta/n) S^2 + |h| S) with
S = 2k - n.  Writing the multiplicity as a binomial pmf at the mean-field bias
p0 = 1/(1 + e^{-2 t_*}) pulls out the exponential scale n*(ln 2 + phi(t_*))
exactly, and what remains is O(log n) in size.  The leftover terms are summed
with log-sum-exp, and pmfs come from Loader's saddle-point algorithm, so the
reduced logs keep close to full double precision even at n = 10^6.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from cwlo.model import ModelParams, Regime, classify_regime, solve_mean_field

__all__ = [
    "LogValue",
    "ConcentrationResult",
    "NuDensity",
    "log_binom_pmf",
    "log_partition",
    "qn_plus_exact",
    "log_O_even",
    "qn_even_exact",
    "log_O_odd",
    "pn_odd_exact",
    "qn_bounds",
    "bernoulli_qnp",
    "nu_density",
    "qn_even_via_mixture",
    "nu_total_mass",
    "mean_field_rate",
]

TIE_RTOL = 1e-12
LOG_2PI = math.log(2.0 * math.pi)


# ---------------------------------------------------------------- log pmf


def _stirlerr_table():
    # log(k!) - (k + 1/2) log k + k - log(2 pi)/2 for small k, from exact factorials
    tab = [0.0]
    for k in range(1, 16):
        tab.append(math.log(math.factorial(k)) - (k + 0.5) * math.log(k) + k - 0.5 * LOG_2PI)
    return np.array(tab)


_STIRLERR_SMALL = _stirlerr_table()
_S0, _S1, _S2, _S3, _S4 = 1 / 12, 1 / 360, 1 / 1260, 1 / 1680, 1 / 1188


def _stirlerr(k):
    k = np.asarray(k, dtype=float)
    out = np.empty_like(k)
    small = k <= 15
    out[small] = _STIRLERR_SMALL[k[small].astype(int)]
    kb = k[~small]
    kk = kb * kb
    out[~small] = (_S0 - (_S1 - (_S2 - (_S3 - _S4 / kk) / kk) / kk) / kk) / kb
    return out


def _bd0(x, npr):
    """x log(x/np) + np - x, accurate when x is close to np."""
    x = np.asarray(x, dtype=float)
    npr = np.broadcast_to(np.asarray(npr, dtype=float), x.shape)
    out = np.empty_like(x)
    near = np.abs(x - npr) < 0.1 * (x + npr)
    if np.any(near):
        xs, ns = x[near], npr[near]
        v = (xs - ns) / (xs + ns)
        s = (xs - ns) * v
        ej = 2.0 * xs * v
        v2 = v * v
        for j in range(1, 40):
            ej = ej * v2
            s_new = s + ej / (2 * j + 1)
            if np.array_equal(s_new, s):
                break
            s = s_new
        out[near] = s
    far = ~near
    if np.any(far):
        xf, nf = x[far], npr[far]
        with np.errstate(divide="ignore"):
            # a bias that underflowed to 0 gives +inf here, i.e. a zero pmf
            out[far] = xf * (np.log(xf) - np.log(nf)) + nf - xf
    return out


def log_binom_pmf(k, n: int, log_p: float, log_q: float):
    """log C(n,k) p^k q^(n-k) by Loader's algorithm; log_p, log_q given separately for accuracy."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    out = np.empty_like(k)
    lo = k == 0
    hi = k == n
    out[lo] = n * log_q
    out[hi] = n * log_p
    mid = ~(lo | hi)
    if np.any(mid):
        km = k[mid]
        npr, nq = n * math.exp(log_p), n * math.exp(log_q)
        lc = _stirlerr(np.array([n]))[0] - _stirlerr(km) - _stirlerr(n - km) - _bd0(km, npr) - _bd0(n - km, nq)
        out[mid] = lc - 0.5 * (LOG_2PI + np.log(km) + np.log1p(-km / n))
    return out


def _log_bias(t0: float):
    """(log p0, log(1 - p0)) for p0 = 1/(1 + e^{-2 t0})."""
    if t0 >= 0:
        lp = -math.log1p(math.exp(-2.0 * t0))
        return lp, lp - 2.0 * t0
    lq = -math.log1p(math.exp(2.0 * t0))
    return lq + 2.0 * t0, lq


# ---------------------------------------------------------------- result types


@dataclass(frozen=True)
class LogValue:
    """A positive quantity stored as scale + reduced, its log being the sum.

    scale is the exactly-factored exponential growth n*(ln 2 + phi(t_*)); ratios
    of two LogValues with the same scale should be formed from `reduced`.
    """

    reduced: float
    scale: float = 0.0

    @property
    def log_value(self) -> float:
        return self.scale + self.reduced

    def __float__(self):
        return self.log_value


@dataclass(frozen=True)
class ConcentrationResult:
    probability: float
    attaining_indices: tuple
    log_numerator: float
    log_denominator: float


def _ratio(num: LogValue, den: LogValue) -> float:
    return math.exp((num.scale - den.scale) + (num.reduced - den.reduced))


# ---------------------------------------------------------------- core sums


@lru_cache(maxsize=256)
def mean_field_rate(p: ModelParams):
    """(z_*, t_*, ln 2 + phi(t_*)) with phi(t_*) written as log cosh t_* - d beta z_*^2."""
    sol = solve_mean_field(p)
    z0, t0 = sol.z_star, sol.t_star
    lc = t0 + math.log1p(math.exp(-2.0 * t0)) - math.log(2.0)
    return z0, t0, math.log(2.0) + lc - p.coupling * z0 * z0


def _reduced_terms(p: ModelParams, n: int, kind: str):
    """Per-term logs minus n*rate, with the magnetization index k (number of + spins)."""
    K = p.coupling
    ah = p.abs_h
    z0, t0, rate = mean_field_rate(p)
    if kind == "Z":
        k = np.arange(n + 1, dtype=float)
    else:
        k = 2.0 * np.arange((n if kind == "O" else n - 1) // 2 + 1, dtype=float)
    m = (2.0 * k - n) / n
    # at h = 0 the two bumps are mirror images; centre each term on its own side
    signs = np.where(m < 0, -1.0, 1.0) if (ah == 0 and z0 > 0) else np.ones_like(m)
    out = np.empty_like(m)
    for s in (1.0, -1.0):
        sel = signs == s
        if not np.any(sel):
            continue
        zc, tc = s * z0, s * t0
        lp, lq = _log_bias(tc)
        delta = ah + 2.0 * K * zc - tc
        ks = k[sel]
        if kind == "Z":
            lb = log_binom_pmf(ks, n, lp, lq)
        elif kind == "O":
            lb = 2.0 * log_binom_pmf(ks / 2, n // 2, lp, lq)
        else:
            lb = log_binom_pmf(ks / 2, (n - 1) // 2, lp, lq) + log_binom_pmf(ks / 2, (n + 1) // 2, lp, lq)
        ms = m[sel]
        out[sel] = lb + n * K * (ms - zc) ** 2 + n * delta * ms
    return k.astype(np.int64), out, n * rate


def _check_n(n, parity=None):
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if parity == "even" and n % 2:
        raise ValueError(f"n must be even, got {n}")
    if parity == "odd" and n % 2 == 0:
        raise ValueError(f"n must be odd, got {n}")


def log_partition(p: ModelParams, n: int) -> LogValue:
    _check_n(n)
    _, terms, scale = _reduced_terms(p, int(n), "Z")
    return LogValue(float(logsumexp(terms)), scale)


def log_O_even(p: ModelParams, n: int) -> LogValue:
    """Weight of the event that both halves of the spins have equal sums."""
    _check_n(n, "even")
    _, terms, scale = _reduced_terms(p, int(n), "O")
    return LogValue(float(logsumexp(terms)), scale)


def log_O_odd(p: ModelParams, n: int) -> LogValue:
    """Weight of the event that the first (n-1)/2 spins sum to one more than the other (n+1)/2."""
    _check_n(n, "odd")
    _, terms, scale = _reduced_terms(p, int(n), "Oodd")
    return LogValue(float(logsumexp(terms)), scale)


def _argmax_set(idx, terms):
    top = terms.max()
    return tuple(int(i) for i in idx[terms >= top + math.log1p(-TIE_RTOL)])


def qn_plus_exact(p: ModelParams, n: int) -> ConcentrationResult:
    """Largest single-magnetization probability, with every maximizing k."""
    _check_n(n)
    k, terms, scale = _reduced_terms(p, int(n), "Z")
    z = LogValue(float(logsumexp(terms)), scale)
    j = int(np.argmax(terms))
    num = LogValue(float(terms[j]), scale)
    return ConcentrationResult(_ratio(num, z), _argmax_set(k, terms), num.log_value, z.log_value)


def qn_even_exact(p: ModelParams, n: int) -> ConcentrationResult:
    """O/Z for even n.  The attaining index is n/2, the count of +1 weights."""
    o, z = log_O_even(p, n), log_partition(p, n)
    return ConcentrationResult(_ratio(o, z), (int(n) // 2,), o.log_value, z.log_value)


def pn_odd_exact(p: ModelParams, n: int) -> ConcentrationResult:
    o, z = log_O_odd(p, n), log_partition(p, n)
    return ConcentrationResult(_ratio(o, z), ((int(n) - 1) // 2,), o.log_value, z.log_value)


def qn_bounds(p: ModelParams, n: int):
    """(lower, upper) for Q_n; equal for even n."""
    _check_n(n)
    if n % 2 == 0:
        q = qn_even_exact(p, n).probability
        return q, q
    if n == 1:
        # a single spin: one weight, the window catches exactly one atom
        return pn_odd_exact(p, 1).probability, 1.0
    return pn_odd_exact(p, n).probability, qn_even_exact(p, n - 1).probability


# ---------------------------------------------------------------- Bernoulli


def _binom_pmf(n: int, prob: float) -> np.ndarray:
    if n == 0:
        return np.ones(1)
    if prob <= 0.0 or prob >= 1.0:
        out = np.zeros(n + 1)
        out[n if prob >= 1.0 else 0] = 1.0
        return out
    return np.exp(log_binom_pmf(np.arange(n + 1), n, math.log(prob), math.log1p(-prob)))


def bernoulli_qnp(n: int, prob: float) -> ConcentrationResult:
    """Concentration of a +-1 weighted sum of n iid spins with P(+1) = prob.

    With l weights equal to +1 and n - l equal to -1, the sum is
    2(X - Y) + n - 2l for X ~ Bin(l, prob), Y ~ Bin(n - l, prob); all values are
    2 apart, so each open window of length 2 catches one of them.  Attaining
    indices are every (l, sum) pair within relative 1e-12 of the maximum.
    """
    _check_n(n)
    if not 0.0 <= prob <= 1.0:
        raise ValueError(f"prob must lie in [0, 1], got {prob}")
    n = int(n)
    best = -1.0
    cands = []
    pmfs = [_binom_pmf(m, prob) for m in range(n + 1)]
    for ell in range(n + 1):
        f, g = pmfs[ell], pmfs[n - ell]
        diff = np.convolve(f, g[::-1])  # index i <-> X - Y = i - (n - ell)
        sums = 2 * (np.arange(diff.size) - (n - ell)) + n - 2 * ell
        mx = diff.max()
        if mx > best:
            best = mx
        cands.append((ell, sums, diff))
    cut = best * (1.0 - TIE_RTOL)
    att = tuple((ell, int(s)) for ell, sums, diff in cands for s in sums[diff >= cut])
    return ConcentrationResult(float(best), att, math.log(best), 0.0)


# ---------------------------------------------------------------- mixture


class NuDensity:
    """Mixing law of the iid bias: the model is an average of iid +-1 laws over it.

    Written in the tilt variable t (bias 1/(1+e^{-2t})), its log density is
    n(ln 2 + log cosh t - (t - h)^2/(4 d beta)) + log sqrt(n/(4 pi d beta)) - log Z.
    """

    def __init__(self, params: ModelParams, n: int):
        _check_n(n)
        if params.beta <= 0:
            raise ValueError("the mixture needs beta > 0")
        self.params = params
        self.n = int(n)
        self.normalization = log_partition(params, n)

    def log_density_t(self, t):
        p, n = self.params, self.n
        t = np.asarray(t, dtype=float)
        a = np.abs(t)
        lc = a + np.log1p(np.exp(-2.0 * a)) - math.log(2.0)
        expo = n * (math.log(2.0) + lc - (t - p.h) ** 2 / (4.0 * p.coupling))
        return expo + 0.5 * math.log(n / (4.0 * math.pi * p.coupling)) - self.normalization.log_value

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any((x <= 0) | (x >= 1)):
            raise ValueError("density argument must lie in (0, 1)")
        t = 0.5 * (np.log(x) - np.log1p(-x))
        out = np.exp(self.log_density_t(t)) / (2.0 * x * (1.0 - x))
        return out if out.ndim else float(out)

    def window(self, sigmas: float = 12.0, drop: float = 60.0):
        """t-interval holding all but a negligible fraction of the mass."""
        p = self.params
        sol = solve_mean_field(p)
        sgn = 1.0 if p.h >= 0 else -1.0
        centres = [sgn * t for t in sol.tilts] + ([-t for t in sol.tilts] if p.h == 0 else [])
        top = max(float(self.log_density_t(c)) for c in centres)
        width = sigmas * math.sqrt(2.0 * p.coupling / self.n)
        lo, hi = min(centres) - width, max(centres) + width
        while self.log_density_t(lo) > top - drop:
            lo -= width
        while self.log_density_t(hi) > top - drop:
            hi += width
        return lo, hi, sorted(set(centres))


def nu_density(p: ModelParams, n: int, x: float) -> float:
    return NuDensity(p, n)(x)


def _quad_window(fun, nu: NuDensity, cfg):
    from scipy.integrate import quad

    sig = getattr(cfg, "truncation_sigmas", 12.0)
    lo, hi, centres = nu.window(sig)
    pts = [c for c in centres if lo < c < hi]
    val, err = quad(
        fun,
        lo,
        hi,
        points=pts or None,
        epsabs=getattr(cfg, "abs_tol", 1e-14),
        epsrel=getattr(cfg, "rel_tol", 1e-12),
        limit=getattr(cfg, "max_subdivisions", 200),
    )
    return val, err


def nu_total_mass(p: ModelParams, n: int, cfg=None) -> float:
    nu = NuDensity(p, n)
    return _quad_window(lambda t: math.exp(nu.log_density_t(t)), nu, cfg)[0]


def qn_even_via_mixture(p: ModelParams, n: int, quad_cfg=None) -> float:
    """Average of the iid concentration bernoulli_qnp over the mixing law."""
    _check_n(n, "even")
    nu = NuDensity(p, n)

    def integrand(t):
        prob = 1.0 / (1.0 + math.exp(-2.0 * t)) if t > -350 else 0.0
        return bernoulli_qnp(n, prob).probability * math.exp(nu.log_density_t(t))

    return _quad_window(integrand, nu, quad_cfg)[0]


def regime_of(p: ModelParams) -> Regime:
    return classify_regime(p)
