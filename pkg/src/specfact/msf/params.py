"""Tuning parameters, results and the error metric shared by all algorithms."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Mapping, Union

import numpy as np

from ..numcore import LaurentPolyMatrix, laurent_adjoint, laurent_mul

__all__ = ["AlgoParams", "FactorResult", "StepRecord", "factorization_error"]

NSchedule = Union[None, int, Mapping[int, int], Callable[[int], int]]


@dataclass(frozen=True)
class AlgoParams:
    """Tuning knobs of the four algorithms.

    Parameters
    ----------
    N_schedule : None, int, mapping or callable
        Truncation N used at recursion step m.  ``None`` selects the
        algorithm default: 5*m*n for JLE-1 and ``ratio * 2**kappa`` (clamped
        to ``2**kappa - n - 1``) for JLE-2.
    kappa : int
        log2 of the grid size used by JLE-2 and Wilson, 10..23.
    ratio : float
        Target N / 2**kappa for JLE-2.
    scalar_iters : int
        Wilson refinement steps after each exp-log scalar factorization.
    wilson_iters : int
        Cap on the matrix Wilson iteration count.
    wilson_band : int or None
        Wilson keeps only the coefficients 0..wilson_band*n of its iterate
        after every step (None keeps the whole causal half of the grid).
    jle3_scalar_iters : int
        Cap on the refinement of (det S)^+ in JLE-3.  The refinement stops
        by itself at round-off; an inaccurate factor would hide a singular
        system behind its own error.
    det_method : {"auto", "fft", "direct"}
        How leading principal minors are formed: DFT interpolation, exact
        permutation expansion, or "auto" (exact up to order 3).
    fm_path : {"determinants", "power"}
        How JLE-1 obtains f_m: quotient of scalar factors of minors, or the
        power identity s_mm = sum |zeta_j|^2 + |f_m|^2.
    delta_solver : {"auto", "dense", "schur"}
        Solver for the wavelet system; "auto" switches to the structured
        solver above ``schur_min_N``.
    scalar_grid : int
        Minimum grid size of scalar factorizations.
    grid_offset : float
        Offset of the JLE-2 / Wilson grid (0.5 = half-shifted).
    node_rcond : float
        JLE-2 node solves below this reciprocal condition fall back to the
        previous node.
    check_wavelets : bool
        Record unitary / determinant / causality defects of every wavelet
        matrix (costs a few FFTs per step).
    """

    N_schedule: NSchedule = None
    kappa: int = 12
    ratio: float = 1.0 / 16
    scalar_iters: int = 5
    wilson_iters: int = 20
    wilson_band: int | None = 4
    jle3_scalar_iters: int = 100
    det_method: str = "auto"
    fm_path: str = "determinants"
    delta_solver: str = "auto"
    schur_min_N: int = 400
    scalar_grid: int = 512
    scalar_method: str = "newton"
    grid_offset: float = 0.5
    node_rcond: float = 1e-12
    delta_rcond: float = 1e-12
    check_wavelets: bool = True
    threads: int | None = None

    def __post_init__(self):
        if not 10 <= int(self.kappa) <= 23:
            raise ValueError(f"kappa must lie in [10, 23], got {self.kappa}")
        if not 0.0 < self.ratio < 1.0:
            raise ValueError(f"ratio must lie in (0, 1), got {self.ratio}")
        if self.det_method not in ("auto", "fft", "direct"):
            raise ValueError(f"unknown det_method {self.det_method!r}")
        if self.fm_path not in ("determinants", "power"):
            raise ValueError(f"unknown fm_path {self.fm_path!r}")
        if self.delta_solver not in ("auto", "dense", "schur"):
            raise ValueError(f"unknown delta_solver {self.delta_solver!r}")
        if self.wilson_band is not None and int(self.wilson_band) < 1:
            raise ValueError(f"wilson_band must be >= 1 or None, got {self.wilson_band}")

    @property
    def K(self):
        return 1 << int(self.kappa)

    def N_for(self, m, default):
        s = self.N_schedule
        if s is None:
            N = default(m)
        elif callable(s):
            N = s(m)
        elif isinstance(s, Mapping):
            N = s[m] if m in s else default(m)
        else:
            N = s
        N = int(N)
        if N < 1:
            raise ValueError(f"truncation N must be positive (m={m}, N={N})")
        return N

    def delta_method(self, N):
        if self.delta_solver == "auto":
            return "schur" if N >= self.schur_min_N else "dense"
        return self.delta_solver

    def snapshot(self):
        """JSON-friendly view (callable schedules are shown by name)."""
        d = asdict(self)
        s = self.N_schedule
        if callable(s):
            d["N_schedule"] = getattr(s, "__name__", "callable")
        elif isinstance(s, Mapping):
            d["N_schedule"] = {str(k): int(v) for k, v in s.items()}
        return d

    def n_workers(self):
        if self.threads is not None:
            t = int(self.threads)
        else:
            t = int(os.environ.get("SPECFACT_THREADS", "1") or 1)
        if t <= 0:
            return os.cpu_count() or 1
        return t

    def map(self, fn, items):
        """Map over independent work items, threaded if allowed."""
        items = list(items)
        w = min(self.n_workers(), len(items))
        if w <= 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=w) as ex:
            return list(ex.map(fn, items))


@dataclass
class StepRecord:
    """Diagnostics of one recursion step."""

    m: int
    N: int
    rcond_V: float | None = None
    unitary_defect: float | None = None
    det_defect: float | None = None
    causality_defect: float | None = None
    truncated_mass: float | None = None
    node_fallbacks: int = 0
    residual: float | None = None
    seconds: float = 0.0


@dataclass(frozen=True, eq=False)
class FactorResult:
    """Output of a factorization.

    Attributes
    ----------
    Splus : LaurentPolyMatrix
        Causal factor on [0, n] with Hermitian positive definite Splus(0).
    err : float
        Coefficient sup-norm of S - Splus Splus^*.
    diagnostics : dict
        Algorithm name, parameters, per-step records and extras.
    """

    Splus: LaurentPolyMatrix
    err: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def steps(self):
        return self.diagnostics.get("steps", [])

    def to_json(self):
        out = {k: v for k, v in self.diagnostics.items() if k != "steps"}
        out["err"] = self.err
        out["steps"] = [asdict(s) if isinstance(s, StepRecord) else s
                        for s in self.steps]
        return _jsonable(out)


def _jsonable(x: Any):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def factorization_error(S, Splus):
    """||S - Splus Splus^*|| in the coefficient sup-norm.

    The difference is taken over the union of both windows, so coefficients
    of the product that fall outside the window of S count as errors.
    """
    if not isinstance(S, LaurentPolyMatrix):
        S = S.as_matrix()
    if not isinstance(Splus, LaurentPolyMatrix):
        Splus = Splus.as_matrix()
    if Splus.rows != S.rows or S.rows != S.cols:
        raise ValueError(f"shape mismatch: S {S.shape}, factor {Splus.shape}")
    return (S - laurent_mul(Splus, laurent_adjoint(Splus))).norm()
