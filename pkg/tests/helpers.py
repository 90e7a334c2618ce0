"""Direct 2^n summation, kept separate from the library so tests have an independent oracle."""

import itertools
import math

from scipy.special import logsumexp


def configurations(n):
    return itertools.product((-1, 1), repeat=n)


def log_weight(p, sigma):
    s = sum(sigma)
    return p.coupling / len(sigma) * s * s + p.h * s


def brute_log_partition(p, n):
    return float(logsumexp([log_weight(p, s) for s in configurations(n)]))


def brute_log_balance(p, n):
    """Log weight of: first half of the spins minus the second half equals 0 (even n) or +1 (odd n)."""
    half = (n - 1) // 2 if n % 2 else n // 2
    target = 1 if n % 2 else 0
    terms = [log_weight(p, s) for s in configurations(n) if sum(s[:half]) - sum(s[half:]) == target]
    return float(logsumexp(terms))


def brute_magnetization_law(p, n):
    """P(sum of spins = n - 2j) for j = number of minus spins, as a list over the + count k."""
    lz = brute_log_partition(p, n)
    out = [0.0] * (n + 1)
    for s in configurations(n):
        k = sum(1 for x in s if x > 0)
        out[k] += math.exp(log_weight(p, s) - lz)
    return out
