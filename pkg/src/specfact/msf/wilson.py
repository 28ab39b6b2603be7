"""Wilson's matrix iteration on a DFT grid."""

from __future__ import annotations

import time

import numpy as np

from ..errors import DivergenceError
from ..numcore import LaurentPolyMatrix, _coeffs_from_values, hermitian_principal_sqrt
from ..scalarfact import grid_plus_half
from .jle import _finish, check_density
from .params import AlgoParams, factorization_error

__all__ = ["wilson"]


def wilson(S, params=None):
    """Factor S by the iteration psi <- psi [psi^{-1} S psi^{-*} + I]_+.

    All work is node-wise on the 2**kappa grid; [.]_+ is the causal
    projection with halved constant term, applied through the FFT.  The
    start is the Hermitian square root of the constant coefficient.

    After each step the iterate is cut to the coefficients
    0..``params.wilson_band * n``.  The exact factor has degree n, so this
    keeps it a fixed point, and it removes the aliased tail that otherwise
    accumulates and stalls the residual when det S nearly vanishes on the
    circle.  The
    iterate with the smallest coefficient residual is returned (truncated to
    degree n); iteration stops early when the residual changes by less than
    1% three times in a row.
    """
    t0 = time.perf_counter()
    params = params or AlgoParams()
    S, r, n = check_density(S)
    K, off = params.K, params.grid_offset
    if 2 * n + 1 > K:
        raise ValueError(f"{K} nodes cannot resolve degree {n}")
    Sv = S.values(K, off)
    psi = np.broadcast_to(hermitian_principal_sqrt(S.coef(0)), (K, r, r)).copy()
    eye = np.eye(r)
    band = None
    if params.wilson_band is not None:
        band = min(max(int(params.wilson_band) * n, n), K // 2 - 1)

    def truncated(psi):
        return LaurentPolyMatrix(_coeffs_from_values(psi, 0, n, off), 0)

    best = truncated(psi)
    err0 = best_err = factorization_error(S, best)
    errs = [err0]
    rises = flat = 0
    stopped = "max_iters"
    for _ in range(int(params.wilson_iters)):
        Pinv = np.linalg.inv(psi)
        M = Pinv @ Sv @ np.conj(np.swapaxes(Pinv, 1, 2)) + eye
        psi = psi @ grid_plus_half(M)
        if band is not None:
            sp = np.fft.fft(psi, axis=0)
            sp[band + 1:] = 0
            psi = np.fft.ifft(sp, axis=0)
        cur = truncated(psi)
        e = factorization_error(S, cur)
        prev = errs[-1]
        errs.append(e)
        if e < best_err:
            best, best_err = cur, e
        rises = rises + 1 if e > prev else 0
        if rises >= 3 and e > err0:
            raise DivergenceError(
                f"Wilson residual rose three times in a row to {e:.3g} (start {err0:.3g})")
        flat = flat + 1 if abs(e - prev) <= 1e-2 * prev else 0
        if flat >= 3:
            stopped = "stagnation"
            break
    extra = {"iterations": len(errs) - 1, "residuals": errs, "stopped": stopped}
    return _finish(S, best, "wilson", params, [], extra, t0=t0)
