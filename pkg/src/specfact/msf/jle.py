"""JLE-1 (rational, determinant based) and JLE-2 (grid based) factorization."""

from __future__ import annotations

import time
import warnings
from contextlib import contextmanager

import numpy as np

from ..errors import ConditioningWarning, NotHermitianError, NumericalError
from ..numcore import LaurentPoly, LaurentPolyMatrix, _coeffs_from_values, polymat_det
from ..scalarfact import RationalCausal, causal_expand, scalar_factor
from ..wavelet import LastRowData
from .params import AlgoParams, FactorResult, StepRecord, factorization_error
from .shortcut import (
    fm_via_power,
    hermitian_part,
    normalize_at_zero,
    recursion_step,
    zeta_at_nodes,
    zeta_cramer,
    zeta_coeffs,
)

__all__ = ["jle1", "jle2", "check_density"]


def check_density(S, tol=1e-10):
    """Validate a square Hermitian density; returns (r, n)."""
    if not isinstance(S, LaurentPolyMatrix):
        S = S.as_matrix()
    if S.rows != S.cols:
        raise ValueError(f"density must be square, got {S.shape}")
    if not S.is_hermitian(tol):
        raise NotHermitianError("density is not Hermitian-symmetric")
    n = max(S.hi, -S.lo, 0)
    return S.restrict(-n, n), S.rows, n


@contextmanager
def _step(m):
    """Tag numerical failures with the recursion step that raised them."""
    try:
        yield
    except NumericalError as exc:
        if getattr(exc, "step", None) is None:
            exc.step = m
            exc.args = (f"recursion step m={m}: {exc}",)
        raise


def _scalar_kw(params):
    return dict(K=params.scalar_grid, iters=params.scalar_iters,
                offset=params.grid_offset, method=params.scalar_method)


def _finish(S, Splus, name, params, steps, extra=None, t0=None):
    Splus = normalize_at_zero(Splus)
    diag = {"algorithm": name, "params": params.snapshot(), "steps": steps}
    if extra:
        diag.update(extra)
    if t0 is not None:
        diag["seconds"] = time.perf_counter() - t0
    return FactorResult(Splus, factorization_error(S, Splus), diag)


def _scalar_result(S, name, params, t0):
    f = scalar_factor(S[0, 0], **_scalar_kw(params))
    n = max(S.hi, 0)
    return _finish(S, f.restrict(0, n).as_matrix(), name, params, [], t0=t0)


def _iac(S, Splus, m):
    """Intermediate residual of the leading m x m block."""
    return factorization_error(S.leading_submatrix(m), Splus)


def jle1(S, params=None):
    """Factor S with the rational (determinant) variant of the recursion.

    Every f_m is the quotient of scalar factors of consecutive leading
    minors, every zeta_j a rational function obtained by Cramer's rule;
    both are expanded exactly into Fourier coefficients before the
    truncation to N.  Reliable for r < 20 and n < 25.
    """
    t0 = time.perf_counter()
    params = params or AlgoParams()
    S, r, n = check_density(S)
    if r == 1:
        return _scalar_result(S, "jle1", params, t0)
    if r >= 20 or n >= 25:
        warnings.warn(f"jle1 on r={r}, n={n} is outside its reliable range "
                      "(r < 20, n < 25)", ConditioningWarning, stacklevel=2)

    kw = _scalar_kw(params)
    if params.fm_path == "determinants":
        dets = params.map(
            lambda m: hermitian_part(polymat_det(S.leading_submatrix(m), params.det_method)),
            range(1, r + 1))
        dplus = params.map(lambda d: scalar_factor(d, **kw), dets)
    else:
        dplus = [scalar_factor(S[0, 0], **kw)]
    Splus = dplus[0].restrict(0, n).as_matrix()
    steps = []
    for m in range(2, r + 1):
        with _step(m):
            rec = StepRecord(m=m, N=params.N_for(m, lambda m: 5 * m * n))
            t1 = time.perf_counter()
            N = rec.N
            col = S[0:m - 1, m - 1:m]
            ratios = zeta_cramer(Splus, col, params.det_method)
            zeta = params.map(lambda x: zeta_coeffs(x, N, n), ratios)
            if params.fm_path == "determinants":
                fm = causal_expand(RationalCausal(dplus[m - 1], dplus[m - 2]), 0, N + n)
            else:
                K = max(params.scalar_grid, 1 << int(np.ceil(np.log2(4 * (N + n + 1)))))
                zv = np.stack([ratios[j].values(K, params.grid_offset) for j in range(m - 1)], 1)
                fm = fm_via_power(S[m - 1, m - 1], np.conj(zv), N + n, params.grid_offset)
            row = LastRowData(tuple(zeta), fm, N, n)
            rec.seconds = time.perf_counter() - t1
            Splus = recursion_step(Splus, row, n, params, rec)
            rec.residual = _iac(S, Splus, m)
            steps.append(rec)
    return _finish(S, Splus, "jle1", params, steps, t0=t0)


def _jle2_default_N(K, n, ratio):
    return lambda m: max(1, min(int(K * ratio), K - n - 1))


def jle2(S, params=None, initial=None):
    """Factor S with the grid variant of the recursion.

    zeta is found node-wise on a 2**kappa point grid, |f_m|^2 from the power
    identity and both are turned into truncated coefficients by FFT.

    ``initial`` may hold an approximate factor of a leading block
    S_[k]; the recursion then starts at step k + 1.
    """
    t0 = time.perf_counter()
    params = params or AlgoParams()
    S, r, n = check_density(S)
    if r == 1 and initial is None:
        return _scalar_result(S, "jle2", params, t0)
    K, off = params.K, params.grid_offset
    default_N = _jle2_default_N(K, n, params.ratio)
    if initial is None:
        Splus = scalar_factor(S[0, 0], **_scalar_kw(params)).restrict(0, n).as_matrix()
    else:
        Splus = initial.restrict(0, n)
    steps = []
    for m in range(Splus.rows + 1, r + 1):
        with _step(m):
            N = params.N_for(m, default_N)
            if N + n >= K:
                raise ValueError(f"N = {N} does not fit the {K}-point grid (need N + n < K)")
            rec = StepRecord(m=m, N=N)
            t1 = time.perf_counter()
            A = Splus.values(K, off)
            B = S[0:m - 1, m - 1:m].values(K, off)
            Z, rec.node_fallbacks = zeta_at_nodes(A, B, params.node_rcond, return_fallbacks=True)
            fm = fm_via_power(S[m - 1, m - 1], Z, N + n, off)
            zc = _coeffs_from_values(Z, -N, n, off)
            zeta = tuple(LaurentPoly(zc[:, j], -N) for j in range(m - 1))
            row = LastRowData(zeta, fm, N, n)
            rec.seconds = time.perf_counter() - t1
            Splus = recursion_step(Splus, row, n, params, rec)
            rec.residual = _iac(S, Splus, m)
            steps.append(rec)
    extra = {"initial_order": None if initial is None else initial.rows}
    return _finish(S, Splus, "jle2", params, steps, extra, t0=t0)
