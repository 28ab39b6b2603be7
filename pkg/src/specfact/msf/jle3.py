"""JLE-3: the last recursion step written as one square linear system.

For every column j of the factor the unknowns are the coefficients of
s^+_{1j}, ..., s^+_{rj} (degree n) and of the (r-1) n degree polynomial
t^{(r-1)n} conj(det S^+ with row r and column j removed).  They satisfy

    sum_i C_i(t) s^+_ij(t) - b(t) s^+_rj(t) + a(t) w_j(t) = 0

with C the row S_[r, 1:r-1] Cof{S_[r-1]}^T and b = det S_[r-1] (both
shifted by t^{(r-1)n}) and a = (det S)^+.  The value of the factor at t = 1
(the Cholesky factor of S(1)) supplies the r missing equations.
"""

from __future__ import annotations

import time

import numpy as np

from ..errors import IllConditionedDeltaError, SingularDeltaError, SingularMatrixError
from ..numcore import (
    LaurentPolyMatrix,
    cholesky_factor,
    laurent_mul,
    lu_solve,
    polymat_det,
    toeplitz_lower,
)
from ..scalarfact import scalar_factor
from .jle import _finish, _scalar_kw, _scalar_result, check_density
from .params import AlgoParams
from .shortcut import _adjugate, hermitian_part

__all__ = ["jle3", "jle3_system"]


def jle3_system(S, params=None, with_rhs=True):
    """The square matrix Delta and right-hand sides [0; h_j] (one per column).

    Returns (Delta, rhs) with Delta of order 2rn - n + r + 1; rhs is None
    when ``with_rhs`` is false.
    """
    params = params or AlgoParams()
    S, r, n = check_density(S)
    lead = S.leading_submatrix(r - 1)
    detS = hermitian_part(polymat_det(S, params.det_method))
    det1 = hermitian_part(polymat_det(lead, params.det_method))
    kw = _scalar_kw(params)
    kw["iters"] = max(params.scalar_iters, params.jle3_scalar_iters)
    a = scalar_factor(detS, **kw).restrict(0, r * n).coeffs
    cof = _adjugate(lead, params.det_method)
    C = laurent_mul(S[r - 1:r, 0:r - 1], cof)
    d = (r - 1) * n
    b = det1.restrict(-d, d).coeffs
    C = C.restrict(-d, d).coeffs[:, 0, :]
    rows = 2 * r * n - n + 1
    order = rows + r
    D = np.zeros((order, order), dtype=complex)
    for i in range(r - 1):
        D[:rows, i * (n + 1):(i + 1) * (n + 1)] = toeplitz_lower(C[:, i], n)
    D[:rows, (r - 1) * (n + 1):r * (n + 1)] = -toeplitz_lower(b, n)
    D[:rows, r * (n + 1):] = toeplitz_lower(a, d)
    for i in range(r):
        D[rows + i, i * (n + 1):(i + 1) * (n + 1)] = 1.0
    if not with_rhs:
        return D, None
    H = cholesky_factor(S.coeffs.sum(axis=0))
    rhs = np.zeros((order, r), dtype=complex)
    rhs[rows:] = H
    return D, rhs


def jle3(S, params=None):
    """Factor S through the single linear system described above.

    Requires det S to be zero-free on the unit circle; otherwise the system
    is singular or badly conditioned and SingularDeltaError /
    IllConditionedDeltaError is raised.
    """
    t0 = time.perf_counter()
    params = params or AlgoParams()
    S, r, n = check_density(S)
    if r == 1:
        return _scalar_result(S, "jle3", params, t0)
    D, _ = jle3_system(S, params, with_rhs=False)
    # row equilibration keeps the condition estimate meaningful when the
    # determinant coefficients are large
    scale = np.abs(D).max(axis=1)
    scale[scale == 0] = 1.0
    D = D / scale[:, None]
    order = D.shape[0]
    try:
        _, rcond = lu_solve(D, np.zeros((order, 1)), return_rcond=True)
    except SingularMatrixError as exc:
        raise SingularDeltaError(
            f"JLE-3 system is singular ({exc}); det S vanishes on or near the circle") from None
    if rcond < params.delta_rcond:
        raise IllConditionedDeltaError(
            f"JLE-3 system has rcond {rcond:.3g} < {params.delta_rcond:g}; "
            "det S vanishes on or near the circle")
    # value of the factor at t = 1 closes the system
    rhs = np.zeros((order, r), dtype=complex)
    rhs[order - r:] = cholesky_factor(S.coeffs.sum(axis=0)) / scale[order - r:, None]
    X = lu_solve(D, rhs)
    coeffs = X[:r * (n + 1)].reshape(r, n + 1, r).transpose(1, 0, 2)
    S0 = LaurentPolyMatrix(coeffs, 0)
    return _finish(S, S0, "jle3", params, [], {"delta_rcond": rcond, "order": D.shape[0]},
                   t0=t0)
