"""Can any weight vector beat the balanced one?

For a handful of spins we search every weight vector with entries drawn from a
small grid (signs allowed) and compare the best window probability with the
balanced +-1 vector.  A grid search can only corroborate, never prove, that the
balanced vector is optimal.
"""

from cwlo.exact import qn_bounds, qn_even_exact, qn_plus_exact
from cwlo.model import ModelParams
from cwlo.oracle import brute_force_qn, brute_force_sup

GRID = (1.0, 1.25, 1.5, 2.0)

for p in (ModelParams(1, 0.3, 0.0), ModelParams(1, 1.0, 0.0), ModelParams(1, 0.3, 0.2)):
    print(f"\nd={p.d} beta={p.beta} h={p.h}")
    for n in (4, 6, 8):
        best, v = brute_force_qn(p, n, GRID)
        print(f"  n={n}: grid best {best:.10f} at {v}, balanced {qn_even_exact(p, n).probability:.10f}")
    lo, hi = qn_bounds(p, 7)
    best, v = brute_force_qn(p, 7, GRID)
    print(f"  n=7: grid best {best:.10f} lies in [{lo:.10f}, {hi:.10f}]")
    best, _ = brute_force_qn(p, 6, GRID, signs=False)
    print(f"  positive weights only, n=6: grid best {best:.10f}, all-ones {qn_plus_exact(p, 6).probability:.10f}")

# a lopsided vector for comparison
p = ModelParams(1, 1.0, 0.0)
val, x = brute_force_sup(p, [1, 1.5, 2, -3, 1, -1])
print(f"\nv=(1,1.5,2,-3,1,-1) at beta=1: {val:.6f} around x={x:+.3f}, balanced gives {qn_even_exact(p, 6).probability:.6f}")
