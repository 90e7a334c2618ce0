"""Independent checks: quadrature, exhaustive enumeration, graph optima, power-law fits."""

from cwlo.oracle.enumeration import (
    AtomDistribution,
    brute_force_qn,
    brute_force_sup,
    configuration_distribution,
)
from cwlo.oracle.fitting import fit_power_law
from cwlo.oracle.graphs import UnimodalWeights, noncrossing_bruteforce, parallel_shift_max
from cwlo.oracle.quadrature import QuadConfig, QuadratureError, quad_W, quad_W_odd, quad_Z_of_x

__all__ = [
    "AtomDistribution",
    "QuadConfig",
    "QuadratureError",
    "UnimodalWeights",
    "brute_force_qn",
    "brute_force_sup",
    "configuration_distribution",
    "fit_power_law",
    "noncrossing_bruteforce",
    "parallel_shift_max",
    "quad_W",
    "quad_W_odd",
    "quad_Z_of_x",
]
