"""Building blocks shared by the recursive algorithms.

At step m the factor of the leading m x m block is obtained from the factor
of the (m-1) x (m-1) block and the last row (zeta_1, ..., zeta_{m-1}, f_m)
of the lower-triangular factor, where

    S_[m-1]^+ (zeta_1, ..., zeta_{m-1})^* = S_[1:m-1, m]
    sum_j |zeta_j|^2 + |f_m|^2 = s_mm.

The row is truncated, a wavelet matrix makes the product analytic and the
result is cut back to degree n.
"""

from __future__ import annotations

import time

import numpy as np

from ..errors import (
    AllNodesSingularError,
    NegativePowerError,
    SingularAtZeroError,
    SingularMatrixError,
)
from ..numcore import (
    LaurentPoly,
    LaurentPolyMatrix,
    cofactor_transpose,
    hermitian_principal_sqrt,
    laurent_mul,
    lu_solve,
    polymat_det,
)
from ..scalarfact import (
    EPS_FLOOR,
    DensitySamples,
    RationalCausal,
    causal_expand,
    scalar_factor,
    scalar_factor_explog,
)
from ..wavelet import assemble_wavelet, build_generators, solve_delta, unitary_defect
from .params import AlgoParams

__all__ = [
    "plus_half",
    "normalize_at_zero",
    "zeta_cramer",
    "zeta_coeffs",
    "zeta_at_nodes",
    "fm_via_determinants",
    "fm_via_power",
    "recursion_step",
    "hermitian_part",
]


def plus_half(F):
    """Causal part with the constant coefficient halved."""
    hi = max(F.hi, 0)
    out = F.restrict(0, hi)
    c = np.array(out.coeffs)
    c[0] = 0.5 * c[0]
    return type(F)(c, 0)


def hermitian_part(P):
    """(P + P^*)/2, removes round-off asymmetry of computed densities."""
    return (P + P.adjoint()) * 0.5


def normalize_at_zero(S0plus, return_unitary=False):
    """Right-multiply by the constant unitary that makes the value at 0
    Hermitian positive definite: U = A^{-1} sqrt(A A^*), A = S0plus(0)."""
    A = np.asarray(S0plus.coef(0))
    try:
        Ainv = lu_solve(A, np.eye(A.shape[0]))
    except SingularMatrixError as exc:
        raise SingularAtZeroError(f"factor is singular at the origin: {exc}") from None
    U = Ainv @ hermitian_principal_sqrt(A @ A.conj().T)
    out = S0plus * LaurentPolyMatrix.constant(U)
    out = out.restrict(0, max(S0plus.hi, 0))
    # the constant term is Hermitian in exact arithmetic; drop the round-off
    c = np.array(out.coeffs)
    c[0] = 0.5 * (c[0] + c[0].conj().T)
    out = LaurentPolyMatrix(c, 0)
    if return_unitary:
        return out, U
    return out


def _adjugate(P, method):
    m = P.rows
    if m == 1:
        return LaurentPolyMatrix.identity(1)
    if method in ("direct", "auto") and m == 2:
        a, b, c, d = P[0, 0], P[0, 1], P[1, 0], P[1, 1]
        return LaurentPolyMatrix.from_entries([[d, -b], [-c, a]])
    return cofactor_transpose(P)


def zeta_cramer(Sprev, col, det_method="auto", detSprev=None):
    """Rational conj(zeta_j) = p_j / q solving Sprev x = col by Cramer's rule.

    ``q = det Sprev`` is causal of degree (m-1) n and, Sprev being an
    (approximate) outer factor, zero-free in the open disk; the numerators
    adj(Sprev) col live on [-n, (m-1) n].
    """
    m1 = Sprev.rows
    if col.rows != m1 or col.cols != 1:
        raise ValueError("column must be (m-1) x 1")
    q = detSprev if detSprev is not None else polymat_det(Sprev, det_method)
    q = q.restrict(0, max(q.hi, 0))
    num = laurent_mul(_adjugate(Sprev, det_method), col)
    return [RationalCausal(num[j, 0], q) for j in range(m1)]


def zeta_coeffs(ratio, N, n):
    """zeta = conj(p/q) on the unit circle, coefficients on [-N, n]."""
    x = causal_expand(ratio, -n, N)
    return LaurentPoly(np.conj(x.coeffs[::-1]), -N)


def zeta_at_nodes(SprevVals, colVals, rcond_min=1e-12, return_fallbacks=False):
    """Node-wise solves of Sprev(t_l) X_l = col(t_l), returning zeta(t_l) = X_l^*.

    Nodes whose reciprocal condition number is below ``rcond_min`` reuse the
    solution of the previous valid node (the first valid node is used for
    leading failures).  Output has shape (K, m-1).
    """
    A = np.asarray(SprevVals, dtype=complex)
    B = np.asarray(colVals, dtype=complex)
    if B.ndim == 3:
        B = B[..., 0]
    K = A.shape[0]
    with np.errstate(all="ignore"):
        s = np.linalg.svd(A, compute_uv=False)
    rc = np.where(s[:, 0] > 0, s[:, -1] / np.where(s[:, 0] > 0, s[:, 0], 1.0), 0.0)
    ok = np.isfinite(rc) & (rc >= rcond_min)
    if not ok.any():
        raise AllNodesSingularError(f"all {K} node systems are singular")
    X = np.zeros_like(B)
    X[ok] = np.linalg.solve(A[ok], B[ok][..., None])[..., 0]
    nbad = int(K - ok.sum())
    if nbad:
        idx = np.where(ok, np.arange(K), -1)
        idx = np.maximum.accumulate(idx)
        idx[idx < 0] = int(np.argmax(ok))
        X = X[idx]
    Z = np.conj(X)
    if return_fallbacks:
        return Z, nbad
    return Z


def fm_via_determinants(detm, detm1, params=None):
    """f_m = (det S_[m])^+ / (det S_[m-1])^+ with both factors scalar."""
    params = params or AlgoParams()
    kw = dict(K=params.scalar_grid, iters=params.scalar_iters,
              offset=params.grid_offset, method=params.scalar_method)
    p = scalar_factor(hermitian_part(detm), **kw)
    if detm1.trim().window == (0, 0):
        c = detm1.coef(0).real
        return RationalCausal(p, LaurentPoly.constant(np.sqrt(c)))
    q = scalar_factor(hermitian_part(detm1), **kw)
    return RationalCausal(p, q)


def fm_via_power(smm, zetaNodeVals, degree, offset=0.5, return_floor=False):
    """f_m^{N} from |f_m|^2 = s_mm - sum_j |zeta_j|^2 on the grid.

    The grid is the one of ``zetaNodeVals`` (K nodes with the given offset);
    the factor is the exp-log factor truncated to ``degree``.
    """
    Z = np.asarray(zetaNodeVals, dtype=complex)
    if Z.ndim == 1:
        Z = Z[:, None]
    K = Z.shape[0]
    power = np.real(smm.values(K, offset)) - np.sum(np.abs(Z) ** 2, axis=1)
    scale = smm.norm()
    if power.min() < -1e-6 * scale:
        raise NegativePowerError(
            f"|f_m|^2 = {power.min():.3g} < 0 at some node; zeta is inaccurate")
    floor = EPS_FLOOR * max(power.max(), np.finfo(float).tiny)
    low = power < floor
    samples = DensitySamples(np.where(low, floor, power), bool(low.any()), offset)
    f = scalar_factor_explog(samples, degree)
    if return_floor:
        return f, int(low.sum())
    return f


def recursion_step(SprevPlus, row, n, params=None, record=None):
    """Factor of the next leading block: [SprevPlus (+) row] U, cut to [0, n].

    Returns the m x m causal factor; diagnostics go to ``record``
    (a StepRecord) when given.
    """
    params = params or AlgoParams()
    t0 = time.perf_counter()
    m = row.m
    if SprevPlus.rows != m - 1:
        raise ValueError(f"previous factor has order {SprevPlus.rows}, row needs {m - 1}")
    _, lambdas = build_generators(row)
    X = solve_delta(lambdas, row.N, params.delta_method(row.N))
    U, rcond = assemble_wavelet(row, X, lambdas)
    UL = U.as_laurent()
    top = laurent_mul(SprevPlus, LaurentPolyMatrix(U.upper, 0))
    bottom = laurent_mul(row.as_matrix(), UL)
    lo, hi = min(top.lo, bottom.lo), max(top.hi, bottom.hi)
    full = np.zeros((hi - lo + 1, m, m), dtype=complex)
    full[top.lo - lo:top.hi - lo + 1, :m - 1] = top.coeffs
    full[bottom.lo - lo:bottom.hi - lo + 1, m - 1:] = bottom.coeffs
    full = LaurentPolyMatrix(full, lo)
    out = full.restrict(0, n)
    if record is not None:
        record.rcond_V = rcond
        mask = np.ones(full.coeffs.shape[0], dtype=bool)
        mask[-lo:-lo + n + 1] = False
        record.truncated_mass = float(np.abs(full.coeffs[mask]).max()) if mask.any() else 0.0
        neg = bottom.coeffs[:max(-bottom.lo, 0)]
        record.causality_defect = float(np.abs(neg).max()) if neg.size else 0.0
        if params.check_wavelets:
            record.unitary_defect, record.det_defect = unitary_defect(
                U, max(4 * row.N, 8))
        record.seconds += time.perf_counter() - t0
    return out
