"""A walk through the four phases: how sharply does a weighted spin sum concentrate?

For each phase we print the exact concentration probability of the balanced
+-1 weight vector, Q_n, next to its one-term asymptotic sqrt(2/pi) cosh(t_*) / sqrt(n),
and the all-ones value Q_n^+ next to its own leading law.
"""

import math

from cwlo.exact import qn_even_exact, qn_plus_exact
from cwlo.model import ModelParams, classify_regime, solve_mean_field
from cwlo.series import qn_coeffs, qn_plus_asymptotic, predict

POINTS = [ModelParams(1, 0.3, 0.0), ModelParams(1, 0.5, 0.0), ModelParams(1, 1.0, 0.0), ModelParams(1, 0.3, 0.2)]
SIZES = [10**2, 10**3, 10**4, 10**5, 10**6]


def main():
    for p in POINTS:
        sol = solve_mean_field(p)
        H = qn_coeffs(p, 0)
        c, e = qn_plus_asymptotic(p)
        print(f"\n{classify_regime(p).value}: d={p.d} beta={p.beta} h={p.h}  z*={sol.z_star:.6f}")
        print(f"{'n':>8} {'Q_n':>12} {'leading':>12} {'Q_n^+':>12} {'c n^e':>12}")
        for n in SIZES:
            q = qn_even_exact(p, n).probability
            qp = qn_plus_exact(p, n).probability
            print(f"{n:>8} {q:12.6e} {predict(p, n, H):12.6e} {qp:12.6e} {c * n ** float(e):12.6e}")
    # at the critical point Q_n^+ decays like n^{-3/4}, faster than Q_n, so their ratio shrinks like n^{-1/4}
    p = POINTS[1]
    for n in (10**4, 10**6):
        ratio = qn_plus_exact(p, n).probability / qn_even_exact(p, n).probability
        print(f"critical Q_n^+/Q_n at n={n}: {ratio:.4f}, ratio * n^(1/4) = {ratio * n ** 0.25:.4f}")


if __name__ == "__main__":
    main()
