"""Unitary (wavelet) matrix functions that make one recursion step analytic.

Given the last row ``(zeta_1, ..., zeta_{m-1}, f)`` of the matrix F_m with
each zeta_j truncated to indices >= -N, we build a polynomial matrix U of
the form

    [ u_11    ...  u_1m    ]
    [  ...          ...    ]
    [ u_m-1,1 ...  u_m-1,m ]
    [ ~u_m1   ...  ~u_mm   ]       ~u(t) = conj(u(t)) on the unit circle

with causal u_ij of degree <= N, U U* = I and det U = 1, such that F_m U
has no negative-index coefficients.  Only one (N+1) x (N+1) Hermitian
positive definite system with m right-hand sides has to be solved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.signal import fftconvolve, lfilter

from .errors import IllConditionedV0Error, SingularMatrixError
from .numcore import LaurentPoly, LaurentPolyMatrix, lu_solve

__all__ = [
    "LastRowData",
    "WaveletMatrix",
    "build_generators",
    "delta_matrix",
    "solve_delta",
    "schur_cholesky",
    "assemble_wavelet",
    "wavelet_matrix",
    "unitary_defect",
    "causality_defect",
]

V0_RCOND_MIN = 1e-12


@dataclass(frozen=True, eq=False)
class LastRowData:
    """Truncated last row of F_m driving one recursion step.

    ``zeta`` holds m-1 Laurent polynomials on [-N, n]; ``fm`` is causal on
    [0, N+n].  Inputs are re-windowed on construction.
    """

    zeta: tuple
    fm: LaurentPoly
    N: int
    n: int

    def __post_init__(self):
        N, n = int(self.N), int(self.n)
        if N < 0 or n < 0:
            raise ValueError("N and n must be nonnegative")
        zeta = tuple(z.restrict(-N, n) for z in self.zeta)
        fm = self.fm.restrict(0, N + n)
        if fm.coeffs[0] == 0:
            raise ValueError("f_m vanishes at the origin")
        object.__setattr__(self, "zeta", zeta)
        object.__setattr__(self, "fm", fm)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "n", n)

    @property
    def m(self):
        return len(self.zeta) + 1

    def as_matrix(self):
        """The last row as a 1 x m Laurent polynomial matrix."""
        return LaurentPolyMatrix.from_entries([list(self.zeta) + [self.fm]])


@dataclass(frozen=True, eq=False)
class WaveletMatrix:
    """Polynomial unitary matrix of the form above.

    Attributes
    ----------
    upper : ndarray, shape (N+1, m-1, m)
        Coefficients of t**k of the first m-1 rows.
    last : ndarray, shape (N+1, m)
        Coefficients of the causal u_mj; the matrix entry is conj(u_mj(t)),
        i.e. it has coefficient conj(last[k, j]) at index -k.
    """

    upper: np.ndarray
    last: np.ndarray

    @property
    def m(self):
        return self.last.shape[1]

    @property
    def N(self):
        return self.last.shape[0] - 1

    def as_laurent(self):
        N, m = self.N, self.m
        c = np.zeros((2 * N + 1, m, m), dtype=complex)
        c[N:, :m - 1, :] = self.upper
        c[:N + 1, m - 1, :] = np.conj(self.last[::-1])
        return LaurentPolyMatrix(c, -N)

    def values(self, K, offset=0.0):
        return self.as_laurent().values(K, offset)


def build_generators(row):
    """Generators of the Hankel blocks.

    Returns ``b`` (the first N+1 coefficients of 1/f_m) and an (m-1, N+1)
    array whose i-th row is (eta_i0, ..., eta_iN), the first row of the
    upper-triangular Hankel matrix D^{-1} Gamma_i.
    """
    N = row.N
    # power-series inverse: only f(0) != 0 is needed, zeros of f on the
    # circle are harmless here
    impulse = np.zeros(N + 1, dtype=complex)
    impulse[0] = 1.0
    b = lfilter([1.0], row.fm.coeffs[:N + 1], impulse)
    lambdas = np.zeros((row.m - 1, N + 1), dtype=complex)
    for i, z in enumerate(row.zeta):
        # gamma_k = c_{-k}{zeta_i}, k = 0..N, gamma_0 = 0
        gamma = np.zeros(N + 1, dtype=complex)
        gamma[1:] = z.coeffs[:N][::-1]
        # eta_k = sum_j b_j gamma_{j+k}
        lambdas[i] = np.convolve(gamma, b[::-1])[N:2 * N + 1]
    return b, lambdas


def hankel_block(lam):
    """Upper-triangular Hankel matrix with first row ``lam``."""
    return sla.hankel(lam)


def _generator(lambdas, N):
    e = np.zeros((N + 1, 1), dtype=complex)
    e[N, 0] = 1.0
    return np.hstack([np.asarray(lambdas, dtype=complex).reshape(-1, N + 1).T, e])


def delta_matrix(lambdas, N):
    """Delta = I + sum_i Theta_i Theta_i^*, filled from its displacement
    equation Delta - Z Delta Z^* = G G^* (Z the upper shift)."""
    G = _generator(lambdas, N)
    D = G @ G.conj().T
    for k in range(N - 1, -1, -1):
        D[k, :N] += D[k + 1, 1:]
    return D


def schur_cholesky(G):
    """Cholesky factor of the flipped matrix from a displacement generator.

    For Delta with Delta - Z Delta Z^* = G G^* (Z the upper shift), the
    flipped matrix P Delta P satisfies the lower-shift equation with
    generator P G.  The generalized Schur algorithm returns lower-triangular
    L with P Delta P = L L^* in O(m N^2) operations.
    """
    G = np.array(G[::-1], dtype=complex)
    n, r = G.shape
    L = np.zeros((n, n), dtype=complex)
    for k in range(n):
        x = np.conj(G[k])
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            raise SingularMatrixError("displacement generator lost rank")
        v = x.copy()
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v[0] += phase * alpha
        vv = np.vdot(v, v).real
        if vv > 0:
            Gk = G[k:]
            Gk -= np.outer(Gk @ v, np.conj(v)) * (2.0 / vv)
        piv = G[k, 0]
        col = G[k:, 0] * (np.conj(piv) / abs(piv))
        L[k:, k] = col
        G[k + 1:, 0] = col[:-1]
        G[k, 0] = 0.0
    return L


def solve_delta(lambdas, N, method="dense"):
    """Solve Delta X = [Lambda_1^T ... Lambda_{m-1}^T, e_0].

    Returns an (N+1, m) array whose columns are the m solutions.
    ``method="dense"`` forms Delta and uses Cholesky, ``method="schur"``
    works from the rank-m displacement generator only.
    """
    lambdas = np.asarray(lambdas, dtype=complex).reshape(-1, N + 1)
    rhs = np.zeros((N + 1, lambdas.shape[0] + 1), dtype=complex)
    rhs[:, :-1] = lambdas.T
    rhs[0, -1] = 1.0
    if method == "dense":
        D = delta_matrix(lambdas, N)
        c = sla.cho_factor(D, lower=True, check_finite=False)
        return sla.cho_solve(c, rhs, check_finite=False)
    if method == "schur":
        L = schur_cholesky(_generator(lambdas, N))
        y = sla.solve_triangular(L, rhs[::-1], lower=True, check_finite=False)
        x = sla.solve_triangular(L, y, lower=True, trans="C", check_finite=False)
        return x[::-1]
    raise ValueError(f"unknown Delta solver {method!r}")


def _hankel_conj_apply(lam, X):
    """Theta^* X for Theta the upper-triangular Hankel matrix of ``lam``."""
    N = lam.shape[0] - 1
    u = np.conj(lam)
    if N < 64:
        return np.conj(sla.hankel(lam)) @ X
    return fftconvolve(u[:, None], X[::-1], axes=0)[N:2 * N + 1]


def assemble_wavelet(row, X, lambdas, rcond_min=V0_RCOND_MIN):
    """Build V from the Delta-solutions and normalize U = V V(1)^{-1}.

    Column j of V (j = 1..m) solves the discretized analyticity system
    generated by X_j: the first m-1 rows are
    P_N^+[conj(eta_i)(t) X_j(1/t)] - delta_ij and the last row entry is
    sum_k X_j[k] t^{-k}.  The columns have a constant Gram matrix
    V(t)^* V(t) on the circle, so normalizing by the value at t = 1 (angle
    zero) gives a unitary U with U(1) = I and det U = 1.

    Returns the WaveletMatrix and the reciprocal condition estimate of V(1).
    """
    X = np.asarray(X, dtype=complex)
    N1, m = X.shape
    upper = np.zeros((N1, m - 1, m), dtype=complex)
    for i in range(m - 1):
        upper[:, i, :] = _hankel_conj_apply(lambdas[i], X)
        upper[0, i, i] -= 1.0
    V1 = np.vstack([upper.sum(axis=0), X.sum(axis=0)[None, :]])
    try:
        W, rcond = lu_solve(V1, np.eye(m), return_rcond=True)
    except SingularMatrixError as exc:
        raise IllConditionedV0Error(f"V(1) is singular: {exc}") from None
    if rcond < rcond_min:
        raise IllConditionedV0Error(f"rcond(V(1)) = {rcond:.3g}; increase N")
    upper = np.matmul(upper, W)
    last = np.conj(X @ W)
    return WaveletMatrix(upper, last), rcond


def wavelet_matrix(row, method="dense", rcond_min=V0_RCOND_MIN):
    """Generators, Delta solve and assembly in one call."""
    _, lambdas = build_generators(row)
    X = solve_delta(lambdas, row.N, method)
    return assemble_wavelet(row, X, lambdas, rcond_min)


def unitary_defect(U, nodes):
    """max_l ||U(t_l) U(t_l)^* - I||_inf and max_l |det U(t_l) - 1|."""
    vals = U.values(int(nodes))
    m = vals.shape[1]
    gram = vals @ np.conj(np.swapaxes(vals, 1, 2)) - np.eye(m)
    defect = float(np.abs(gram).sum(axis=2).max())
    det_defect = float(np.abs(np.linalg.det(vals) - 1.0).max())
    return defect, det_defect


def causality_defect(row, U):
    """Largest negative-index coefficient of F_m^{N} U (the last row; the
    other rows of F_m U are rows of U and causal by construction)."""
    prod = row.as_matrix() * U.as_laurent()
    if prod.lo >= 0:
        return 0.0
    neg = prod.coeffs[:-prod.lo]
    return float(np.abs(neg).max())
