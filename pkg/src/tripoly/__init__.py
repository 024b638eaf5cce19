"""Triangular polynomial dynamical systems over prime fields: construction
and validation, exact degree growth, pseudorandom vector streams, exponential
sums, and discrepancy measurement."""

from ._kernels import BACKEND, HAVE_EXT
from .ffield import Element, Field, is_prime
from .mpoly import NEG_INF, Polynomial, PolyRing
from .trisys import (
    ComboResult,
    combo_violation_scan,
    DegreeVector,
    TriangularSystem,
    build_system,
    combo_nonconstant_check,
    degree_vector,
    dyndeg_estimate,
    fast_system,
    iterate_symbolic,
    predicted_leading,
    random_system,
)
from .genseq import (
    CycleInfo,
    advance_to_cycle,
    fast_step,
    find_cycle,
    generate,
    generate_array,
    step,
)
from .spectra import (
    BoundEnvelope,
    CharacterSum,
    critical_exponent,
    e_char,
    exp_sum,
    exp_sum_max,
    nu1_large_n_exponent,
    weil_bruteforce,
)
from .discrep import (
    DiscrepancyReport,
    measure_residues,
    extreme_discrepancy_exact,
    koksma_szusz_bound,
    koksma_szusz_bound_points,
    measure_discrepancy,
    scale_points,
    star_discrepancy_exact,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundEnvelope",
    "CharacterSum",
    "ComboResult",
    "CycleInfo",
    "DegreeVector",
    "DiscrepancyReport",
    "Element",
    "Field",
    "HAVE_EXT",
    "NEG_INF",
    "Polynomial",
    "PolyRing",
    "TriangularSystem",
    "advance_to_cycle",
    "build_system",
    "combo_nonconstant_check",
    "combo_violation_scan",
    "critical_exponent",
    "degree_vector",
    "dyndeg_estimate",
    "e_char",
    "exp_sum",
    "exp_sum_max",
    "extreme_discrepancy_exact",
    "fast_step",
    "fast_system",
    "find_cycle",
    "generate",
    "generate_array",
    "is_prime",
    "iterate_symbolic",
    "koksma_szusz_bound",
    "koksma_szusz_bound_points",
    "measure_discrepancy",
    "measure_residues",
    "nu1_large_n_exponent",
    "predicted_leading",
    "random_system",
    "scale_points",
    "star_discrepancy_exact",
    "step",
    "weil_bruteforce",
    "__version__",
]
