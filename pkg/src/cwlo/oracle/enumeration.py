"""Exhaustive laws of weighted spin sums and the sup over unit-length open windows."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from cwlo.model import ModelParams

__all__ = [
    "AtomDistribution",
    "configuration_distribution",
    "grouped_distribution",
    "window_delta",
    "brute_force_sup",
    "brute_force_qn",
    "MAX_SUP_SPINS",
    "MAX_QN_SPINS",
]

MAX_SUP_SPINS = 16
MAX_QN_SPINS = 12
MERGE_TOL = 1e-12


def window_delta(v) -> float:
    """Shrink applied to the open window (x-1, x+1) so atoms exactly 2 apart are not both caught."""
    return 1e-9 * max(1.0, float(np.max(np.abs(v))) if len(v) else 1.0)


@dataclass(frozen=True)
class AtomDistribution:
    locations: np.ndarray
    masses: np.ndarray

    @classmethod
    def from_points(cls, locs, masses, tol: float = MERGE_TOL) -> "AtomDistribution":
        locs = np.asarray(locs, dtype=float)
        masses = np.asarray(masses, dtype=float)
        order = np.argsort(locs, kind="stable")
        locs, masses = locs[order], masses[order]
        scale = max(1.0, float(np.max(np.abs(locs)))) if locs.size else 1.0
        # start a new atom wherever the gap exceeds the merge tolerance
        new = np.concatenate([[True], np.diff(locs) > tol * scale])
        ids = np.cumsum(new) - 1
        merged_m = np.bincount(ids, weights=masses)
        merged_x = locs[new]
        keep = merged_m > 0
        return cls(merged_x[keep], merged_m[keep])

    @property
    def atoms(self):
        return list(zip(self.locations.tolist(), self.masses.tolist()))

    def total_mass(self) -> float:
        return math.fsum(self.masses)

    def sup_window(self, delta: float):
        """max over x of the mass in (x-1, x+1), with the window shrunk by delta on each side.

        Every optimal window can be slid right until its left end meets an atom,
        so only windows [a, a + 2 - 2 delta) with a an atom need checking.
        """
        return _sweep(self.locations, self.masses, delta)

    def sup_window_naive(self, delta: float):
        best, wit = -1.0, 0.0
        for a in self.locations:
            m = math.fsum(self.masses[(self.locations >= a) & (self.locations < a + 2.0 - 2.0 * delta)])
            if m > best:
                inside = self.locations[(self.locations >= a) & (self.locations < a + 2.0 - 2.0 * delta)]
                best, wit = m, 0.5 * float(inside[0] + inside[-1])
        return best, wit


def _sweep(locs, masses, delta):
    cum = np.concatenate([[0.0], np.cumsum(masses)])
    end = np.searchsorted(locs, locs + 2.0 - 2.0 * delta, side="left")
    window = cum[end] - cum[: locs.size]
    i = int(np.argmax(window))
    # centre the witness on the captured atoms; that open window holds at least as much
    return float(window[i]), 0.5 * float(locs[i] + locs[end[i] - 1])


def configuration_distribution(p: ModelParams, v) -> AtomDistribution:
    """Law of sum_i v_i sigma_i under the model, by listing all 2^n configurations."""
    v = np.asarray(v, dtype=float)
    n = v.size
    if n < 1:
        raise ValueError("need at least one weight")
    if n > MAX_SUP_SPINS:
        raise ValueError(f"exhaustive enumeration is capped at n = {MAX_SUP_SPINS}")
    bits = (np.arange(2**n)[:, None] >> np.arange(n)[None, :]) & 1
    sigma = 2 * bits - 1
    S = sigma.sum(axis=1).astype(float)
    logw = p.coupling / n * S * S + p.h * S
    logw -= logsumexp(logw)
    return AtomDistribution.from_points(sigma @ v, np.exp(logw))


def brute_force_sup(p: ModelParams, v):
    """(sup over x of P(sum v_i sigma_i in (x-1, x+1)), a witnessing x)."""
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(v) < 1):
        raise ValueError("weights must satisfy |v_i| >= 1")
    dist = configuration_distribution(p, v)
    return dist.sup_window(window_delta(v))


def grouped_distribution(p: ModelParams, values, counts):
    """Unsorted atoms of the weighted sum when counts[g] spins carry weight values[g].

    Exchangeability means only the number of + spins in each group matters.
    """
    n = int(sum(counts))
    grids = np.meshgrid(*[np.arange(c + 1) for c in counts], indexing="ij")
    ks = [g.ravel() for g in grids]
    logm = np.zeros(ks[0].shape)
    S = np.zeros(ks[0].shape)
    loc = np.zeros(ks[0].shape)
    for val, c, k in zip(values, counts, ks):
        logm += gammaln(c + 1) - gammaln(k + 1) - gammaln(c - k + 1)
        spins = 2 * k - c
        S += spins
        loc += val * spins
    logw = logm + p.coupling / n * S * S + p.h * S
    return loc, logw


def _multiset_value(p, values, counts, delta, log_norm):
    loc, logw = grouped_distribution(p, values, counts)
    order = np.argsort(loc, kind="stable")
    return _sweep(loc[order], np.exp(logw[order] - log_norm), delta)[0]


def brute_force_qn(p: ModelParams, n: int, weight_grid, signs: bool = True):
    """Best window probability over weight vectors with entries from weight_grid.

    With signs=True every entry may also be negated (the Q_n search) and the
    search starts from the balanced +-1 vector; with signs=False weights stay
    positive (the Q_n^+ search) and the start is the all-ones vector.  The
    start is replaced only by a vector better by more than 1e-12.  Only
    multisets are enumerated, since the spins are exchangeable.
    Returns (best, best_v).
    """
    if n < 1 or n > MAX_QN_SPINS:
        raise ValueError(f"n must lie in 1..{MAX_QN_SPINS}")
    mags = sorted({float(w) for w in weight_grid})
    if not mags or any(w < 1 for w in mags):
        raise ValueError("weight grid values must be >= 1")
    n = int(n)
    grid = sorted(set(mags + [-w for w in mags])) if signs else mags
    delta = window_delta(mags)
    S = np.arange(-n, n + 1, 2, dtype=float)
    k = (S + n) / 2
    log_norm = float(logsumexp(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1) + p.coupling / n * S * S + p.h * S))

    ones = [(1.0, (n + 1) // 2), (-1.0, n // 2)] if signs else [(1.0, n)]
    ones = [(w, c) for w, c in ones if c > 0]
    best = _multiset_value(p, [w for w, _ in ones], [c for _, c in ones], delta, log_norm)
    best_v = tuple(w for w, c in ones for _ in range(c))

    mirror = signs and p.h == 0
    for combo in itertools.combinations_with_replacement(grid, n):
        if mirror and tuple(sorted(-w for w in combo)) < combo:
            continue  # at h = 0 a vector and its negation have the same law up to reflection
        vals, counts = np.unique(np.array(combo), return_counts=True)
        val = _multiset_value(p, vals.tolist(), counts.tolist(), delta, log_norm)
        if val > best + 1e-12:
            best, best_v = val, tuple(combo)
    return best, best_v
