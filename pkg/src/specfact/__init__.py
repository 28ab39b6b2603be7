"""Matrix spectral factorization of Laurent polynomial matrices.

Given a Hermitian matrix Laurent polynomial S(t), positive definite on the
unit circle, find the causal polynomial factor S^+ with S = S^+ (S^+)^* and
S^+(0) Hermitian positive definite.  Four algorithms are provided: the
recursive JLE-1 and JLE-2, the single-system JLE-3 and Wilson's iteration.
"""

from . import errors
from .harness import MatrixFamilySpec, fixture, random_spd
from .io import load_coeffs, save_coeffs
from .msf import AlgoParams, FactorResult, factorization_error, jle1, jle2, jle3, wilson
from .numcore import LaurentPoly, LaurentPolyMatrix
from .scalarfact import scalar_factor

__version__ = "0.1.0"

__all__ = [
    "errors",
    "LaurentPoly", "LaurentPolyMatrix", "scalar_factor",
    "AlgoParams", "FactorResult", "factorization_error",
    "jle1", "jle2", "jle3", "wilson",
    "MatrixFamilySpec", "random_spd", "fixture",
    "load_coeffs", "save_coeffs",
]
