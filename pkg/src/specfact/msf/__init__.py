"""Matrix spectral factorization algorithms."""

from .jle import jle1, jle2
from .jle3 import jle3
from .wilson import wilson
from .params import AlgoParams, FactorResult, StepRecord, factorization_error
from .shortcut import (
    fm_via_determinants,
    fm_via_power,
    normalize_at_zero,
    plus_half,
    recursion_step,
    zeta_at_nodes,
    zeta_cramer,
)

__all__ = [
    "AlgoParams", "FactorResult", "StepRecord", "factorization_error",
    "jle1", "jle2", "jle3", "wilson",
    "plus_half", "normalize_at_zero", "zeta_cramer", "zeta_at_nodes",
    "fm_via_determinants", "fm_via_power", "recursion_step",
]
