"""Corrections at the critical point come in quarter powers of n.

The partition function ladder runs n^{1/4}, n^{-1/4}, n^{-3/4}, ...; we watch the
truncation error shrink as more terms are kept, then watch n(Q_n - sqrt(2/pi)/sqrt(n))
settle on the second Q_n coefficient.
"""

import math

from cwlo.exact import log_partition, qn_even_exact
from cwlo.model import ModelParams
from cwlo.oracle import fit_power_law
from cwlo.series import e_coeffs, ladder_sum, qn_coeffs

p = ModelParams(1, 0.5, 0.0)
ns = [2**k for k in range(8, 17)]

e = e_coeffs(p, 4)
print("partition ladder:", ", ".join(f"{v:+.6f} n^{q}" for v, q in zip(e.values, e.powers)))

normalized = {}
for n in ns:
    z = log_partition(p, n)
    normalized[n] = math.exp(z.reduced + (z.scale - n * e.prefactor_log))

for M in range(4):
    c = e.truncated(M)
    res = [(n, abs(normalized[n] - ladder_sum(c, n))) for n in ns]
    slope, _ = fit_power_law(res)
    print(f"M={M}: error at n=2^16 {res[-1][1]:.3e}, fitted decay n^{slope:.3f}, next power {float(e.powers[M + 1]):.2f}")

H = qn_coeffs(p, 1).values
print(f"\nQ_n second coefficient: {H[1]:.6f}  (2 sqrt(3 pi) / Gamma(1/4)^2 = {2 * math.sqrt(3 * math.pi) / math.gamma(0.25) ** 2:.6f})")
for k in range(10, 21, 2):
    n = 2**k
    q = qn_even_exact(p, n).probability
    print(f"n=2^{k:<2} n(Q_n - sqrt(2/pi)/sqrt n) = {n * (q - H[0] / math.sqrt(n)):.6f}")
