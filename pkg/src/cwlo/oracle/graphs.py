"""Heaviest non-crossing edge set between two rows of weighted vertices.

Vertex k of the top row has weight f(k), vertex m of the bottom row g(m), and
an edge (m, k) weighs f(k) g(m).  For unimodal rows the best non-crossing set
is a "parallel" one, all edges sharing the shift d = k - m.  Arithmetic is
done in Fractions so the two optima can be compared for exact equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = ["UnimodalWeights", "is_unimodal", "parallel_shift_max", "noncrossing_bruteforce", "MAX_ROW"]

MAX_ROW = 9


def _exact(x):
    return x if isinstance(x, (int, Fraction)) else Fraction(x)


def is_unimodal(values) -> bool:
    i, n = 0, len(values)
    while i + 1 < n and values[i + 1] >= values[i]:
        i += 1
    while i + 1 < n and values[i + 1] <= values[i]:
        i += 1
    return i == n - 1


@dataclass(frozen=True)
class UnimodalWeights:
    values: tuple

    def __post_init__(self):
        vals = tuple(_exact(v) for v in self.values)
        if not vals:
            raise ValueError("need at least one vertex")
        if any(v < 0 for v in vals):
            raise ValueError("weights must be non-negative")
        if not is_unimodal(vals):
            raise ValueError(f"weights are not unimodal: {self.values}")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)


def _as_weights(w):
    return w if isinstance(w, UnimodalWeights) else UnimodalWeights(tuple(w))


def parallel_shift_max(f, g):
    """(max_d sum_{k - m = d} f(k) g(m), smallest maximizing d)."""
    f, g = _as_weights(f).values, _as_weights(g).values
    best, best_d = None, None
    for d in range(-(len(g) - 1), len(f)):
        tot = sum((f[m + d] * g[m] for m in range(len(g)) if 0 <= m + d < len(f)), Fraction(0))
        if best is None or tot > best:
            best, best_d = tot, d
    return best, best_d


def noncrossing_bruteforce(f, g):
    """Max total weight over all chains (m_1, k_1) < (m_2, k_2) < ... strictly increasing in both.

    best[m][k] is the heaviest chain whose edges all have bottom index < m and
    top index < k; each cell either skips a row or ends the chain at (m-1, k-1).
    Inputs need not be unimodal here.
    """
    f = tuple(_exact(v) for v in (f.values if isinstance(f, UnimodalWeights) else f))
    g = tuple(_exact(v) for v in (g.values if isinstance(g, UnimodalWeights) else g))
    if len(f) > MAX_ROW or len(g) > MAX_ROW:
        raise ValueError(f"rows are capped at {MAX_ROW} vertices")
    best = [[Fraction(0)] * (len(f) + 1) for _ in range(len(g) + 1)]
    for m in range(1, len(g) + 1):
        for k in range(1, len(f) + 1):
            best[m][k] = max(best[m - 1][k], best[m][k - 1], best[m - 1][k - 1] + f[k - 1] * g[m - 1])
    return best[len(g)][len(f)]
