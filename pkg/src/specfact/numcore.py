"""Laurent-polynomial (matrix) arithmetic, DFT-grid evaluation and the small
set of dense complex linear algebra routines the factorization algorithms
are built on.

A Laurent polynomial is stored densely as a coefficient array whose first
axis runs over the integer indices ``lo, lo+1, ..., hi``.  Scalars use a 1-d
array, matrices a 3-d array of shape ``(hi - lo + 1, rows, cols)``.

DFT nodes are ``t_l = exp(2j*pi*(l + offset)/K)``.  ``offset=0`` is the
ordinary grid; ``offset=0.5`` gives the half-shifted grid, which avoids the
points 1, -1, i, -i where the singular test densities vanish.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import permutations

import numpy as np
import scipy.linalg as sla
from scipy.fft import fft, ifft, next_fast_len

from .errors import (
    AliasError,
    ConditioningWarning,
    NotHermitianError,
    NotPositiveDefiniteError,
    SingularMatrixError,
    SingularNodeError,
)

__all__ = [
    "LaurentPoly",
    "LaurentPolyMatrix",
    "next_pow2",
    "grid_nodes",
    "dft_eval",
    "idft_interpolate",
    "polymat_det",
    "cofactor_transpose",
    "toeplitz_lower",
    "laurent_mul",
    "laurent_adjoint",
    "lu_solve",
    "cholesky_factor",
    "hermitian_principal_sqrt",
    "sup_norm",
]

# pivot threshold relative to the largest entry of the input matrix
PIVOT_RTOL = 1e-13
# direct (loop) convolution below this length, FFT above
_DIRECT_CONV_MAX = 40


def next_pow2(k):
    """Smallest power of two that is >= k (and >= 1)."""
    k = int(k)
    return 1 if k <= 1 else 1 << (k - 1).bit_length()


def grid_nodes(K, offset=0.0):
    return np.exp(2j * np.pi * (np.arange(K) + offset) / K)


# ---------------------------------------------------------------------------
# raw array helpers (first axis = coefficient index)
# ---------------------------------------------------------------------------

def _values_from_coeffs(coeffs, lo, K, offset=0.0):
    coeffs = np.asarray(coeffs, dtype=complex)
    idx = np.arange(lo, lo + coeffs.shape[0])
    c = coeffs
    if offset:
        phase = np.exp(2j * np.pi * offset * idx / K)
        c = coeffs * phase.reshape((-1,) + (1,) * (coeffs.ndim - 1))
    buf = np.zeros((K,) + coeffs.shape[1:], dtype=complex)
    np.add.at(buf, idx % K, c)
    return K * ifft(buf, axis=0)


def _coeffs_from_values(values, lo, hi, offset=0.0):
    values = np.asarray(values, dtype=complex)
    K = values.shape[0]
    spec = fft(values, axis=0) / K
    idx = np.arange(lo, hi + 1)
    out = spec[idx % K]
    if offset:
        phase = np.exp(-2j * np.pi * offset * idx / K)
        out = out * phase.reshape((-1,) + (1,) * (values.ndim - 1))
    return out


def _convolve(a, b, matrix):
    """Coefficient convolution; matrix=True means matrix products per term."""
    la, lb = a.shape[0], b.shape[0]
    n_out = la + lb - 1
    if not matrix:
        if min(la, lb) <= _DIRECT_CONV_MAX:
            return np.convolve(a, b)
        nfft = next_fast_len(n_out)
        return ifft(fft(a, nfft) * fft(b, nfft))[:n_out]
    out_shape = (n_out, a.shape[1], b.shape[2])
    if min(la, lb) <= _DIRECT_CONV_MAX:
        out = np.zeros(out_shape, dtype=complex)
        if la <= lb:
            for k in range(la):
                out[k:k + lb] += np.matmul(a[k], b)
        else:
            for k in range(lb):
                out[k:k + la] += np.matmul(a, b[k])
        return out
    nfft = next_fast_len(n_out)
    A = fft(a, nfft, axis=0)
    B = fft(b, nfft, axis=0)
    return ifft(np.matmul(A, B), axis=0)[:n_out]


# ---------------------------------------------------------------------------
# Laurent polynomial containers
# ---------------------------------------------------------------------------

class _Laurent:
    _ndim = 1

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != self._ndim:
            raise ValueError(
                f"{type(self).__name__} needs a {self._ndim}-d coefficient array, "
                f"got shape {c.shape}")
        if c.shape[0] == 0:
            raise ValueError("empty coefficient window")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "lo", int(self.lo))

    @property
    def hi(self):
        return self.lo + self.coeffs.shape[0] - 1

    @property
    def window(self):
        return self.lo, self.hi

    def coef(self, k):
        """Coefficient at index k (zero outside the stored window)."""
        if self.lo <= k <= self.hi:
            return self.coeffs[k - self.lo]
        return np.zeros(self.coeffs.shape[1:], dtype=complex)[()]

    def restrict(self, lo, hi):
        """Copy supported on [lo, hi]: coefficients outside are dropped, new
        indices are zero-filled."""
        if hi < lo:
            raise ValueError("hi < lo")
        out = np.zeros((hi - lo + 1,) + self.coeffs.shape[1:], dtype=complex)
        a, b = max(lo, self.lo), min(hi, self.hi)
        if a <= b:
            out[a - lo:b - lo + 1] = self.coeffs[a - self.lo:b - self.lo + 1]
        return type(self)(out, lo)

    def trim(self, tol=0.0):
        """Drop leading/trailing coefficients with magnitude <= tol."""
        mag = np.abs(self.coeffs).reshape(self.coeffs.shape[0], -1).max(axis=1)
        keep = np.nonzero(mag > tol)[0]
        if keep.size == 0:
            return self.restrict(0, 0) * 0
        return self.restrict(self.lo + keep[0], self.lo + keep[-1])

    def norm(self):
        """Coefficient sup-norm: largest coefficient magnitude of any entry."""
        return float(np.abs(self.coeffs).max())

    def values(self, K, offset=0.0):
        return _values_from_coeffs(self.coeffs, self.lo, K, offset)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        k = np.arange(self.lo, self.hi + 1)
        powers = z[..., None] ** k
        if self._ndim == 1:
            return powers @ self.coeffs
        return np.tensordot(powers, self.coeffs, axes=([-1], [0]))

    def adjoint(self):
        return laurent_adjoint(self)

    def _binary(self, other, sign):
        if np.isscalar(other):
            other = type(self)(np.full((1,) + self.coeffs.shape[1:], other), 0)
        if not isinstance(other, _Laurent):
            return NotImplemented
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        a, b = self.restrict(lo, hi), other.restrict(lo, hi)
        return type(self)(a.coeffs + sign * b.coeffs, lo)

    def __add__(self, other):
        return self._binary(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, -1)

    def __rsub__(self, other):
        return (-self)._binary(other, 1)

    def __neg__(self):
        return type(self)(-self.coeffs, self.lo)

    def __mul__(self, other):
        if isinstance(other, _Laurent):
            return laurent_mul(self, other)
        return type(self)(self.coeffs * other, self.lo)

    def __rmul__(self, other):
        if isinstance(other, _Laurent):
            return laurent_mul(other, self)
        return type(self)(other * self.coeffs, self.lo)

    def __truediv__(self, other):
        return type(self)(self.coeffs / other, self.lo)

    def shift(self, k):
        """Multiply by t**k."""
        return type(self)(self.coeffs, self.lo + k)

    def is_hermitian(self, tol=1e-10):
        diff = (self - self.adjoint()).norm()
        return diff <= tol * max(1.0, self.norm())


@dataclass(frozen=True, eq=False)
class LaurentPoly(_Laurent):
    """Scalar Laurent polynomial ``sum_{k=lo}^{hi} coeffs[k-lo] t**k``."""

    coeffs: np.ndarray
    lo: int = 0
    _ndim = 1

    def __repr__(self):
        return f"LaurentPoly(lo={self.lo}, hi={self.hi}, coeffs={self.coeffs!r})"

    @classmethod
    def constant(cls, c):
        return cls(np.array([c], dtype=complex), 0)

    def as_matrix(self):
        return LaurentPolyMatrix(self.coeffs[:, None, None], self.lo)


@dataclass(frozen=True, eq=False)
class LaurentPolyMatrix(_Laurent):
    """Matrix Laurent polynomial with coefficients ``coeffs[k-lo]`` of t**k.

    All entries share the window [lo, hi].
    """

    coeffs: np.ndarray
    lo: int = 0
    _ndim = 3

    def __repr__(self):
        return (f"LaurentPolyMatrix({self.rows}x{self.cols}, lo={self.lo}, "
                f"hi={self.hi})")

    @property
    def rows(self):
        return self.coeffs.shape[1]

    @property
    def cols(self):
        return self.coeffs.shape[2]

    @property
    def shape(self):
        return self.coeffs.shape[1:]

    @classmethod
    def identity(cls, m):
        return cls(np.eye(m, dtype=complex)[None], 0)

    @classmethod
    def constant(cls, C):
        C = np.atleast_2d(np.asarray(C, dtype=complex))
        return cls(C[None], 0)

    @classmethod
    def from_entries(cls, entries):
        """Build from a nested list of LaurentPoly (None means zero)."""
        rows, cols = len(entries), len(entries[0])
        present = [p for row in entries for p in row if p is not None]
        lo = min(p.lo for p in present) if present else 0
        hi = max(p.hi for p in present) if present else 0
        out = np.zeros((hi - lo + 1, rows, cols), dtype=complex)
        for i, row in enumerate(entries):
            for j, p in enumerate(row):
                if p is not None:
                    out[:, i, j] = p.restrict(lo, hi).coeffs
        return cls(out, lo)

    def __getitem__(self, key):
        i, j = key
        if isinstance(i, (int, np.integer)) and isinstance(j, (int, np.integer)):
            return LaurentPoly(self.coeffs[:, i, j], self.lo)
        sub = self.coeffs[:, i, j]
        if sub.ndim != 3:
            raise IndexError("use slices to extract a sub-matrix")
        return LaurentPolyMatrix(sub, self.lo)

    def transpose(self):
        return LaurentPolyMatrix(np.swapaxes(self.coeffs, 1, 2), self.lo)

    def leading_submatrix(self, m):
        """Upper-left m x m block."""
        return LaurentPolyMatrix(self.coeffs[:, :m, :m], self.lo)


def sup_norm(P):
    return P.norm()


def laurent_adjoint(P):
    """P*(t) = conj-transpose of P(1/conj(t)); index k maps to -k."""
    c = np.conj(P.coeffs[::-1])
    if isinstance(P, LaurentPolyMatrix):
        return LaurentPolyMatrix(np.swapaxes(c, 1, 2), -P.hi)
    return LaurentPoly(c, -P.hi)


def laurent_mul(P, Q):
    """Product of two Laurent polynomials (matrices, scalars or a mix).

    The result lives on ``[P.lo + Q.lo, P.hi + Q.hi]``.
    """
    lo = P.lo + Q.lo
    pm = isinstance(P, LaurentPolyMatrix)
    qm = isinstance(Q, LaurentPolyMatrix)
    if pm and qm:
        if P.cols != Q.rows:
            raise ValueError(f"inner dimensions differ: {P.shape} @ {Q.shape}")
        return LaurentPolyMatrix(_convolve(P.coeffs, Q.coeffs, True), lo)
    if not pm and not qm:
        return LaurentPoly(_convolve(P.coeffs, Q.coeffs, False), lo)
    # scalar times matrix: entrywise convolution
    M, s = (P, Q) if pm else (Q, P)
    r, c = M.shape
    flat = M.coeffs.reshape(M.coeffs.shape[0], -1)
    out = np.stack([_convolve(flat[:, e], s.coeffs, False) for e in range(r * c)],
                   axis=1)
    return LaurentPolyMatrix(out.reshape(-1, r, c), lo)


# ---------------------------------------------------------------------------
# DFT machinery
# ---------------------------------------------------------------------------

def dft_eval(P, K, offset=0.0):
    """Values of P at the K DFT nodes, stacked along the first axis."""
    if K < 1:
        raise ValueError("K must be positive")
    return P.values(K, offset)


def idft_interpolate(values, lo, hi, offset=0.0):
    """Laurent polynomial on [lo, hi] matching samples on the DFT grid.

    ``values`` has the node index first: shape (K,) for scalars or
    (K, rows, cols) for matrices.
    """
    values = np.asarray(values, dtype=complex)
    K = values.shape[0]
    if K < hi - lo + 1:
        raise AliasError(f"{K} nodes cannot resolve the window [{lo}, {hi}]")
    coeffs = _coeffs_from_values(values, lo, hi, offset)
    if values.ndim == 1:
        return LaurentPoly(coeffs, lo)
    return LaurentPolyMatrix(coeffs, lo)


def _degree(P):
    return max(abs(P.lo), abs(P.hi))


def _direct_det(P):
    m = P.rows
    entries = [[P[i, j] for j in range(m)] for i in range(m)]
    total = None
    for perm in permutations(range(m)):
        inv = sum(1 for a in range(m) for b in range(a + 1, m) if perm[a] > perm[b])
        term = entries[0][perm[0]]
        for i in range(1, m):
            term = term * entries[i][perm[i]]
        term = -term if inv % 2 else term
        total = term if total is None else total + term
    return total.restrict(m * P.lo, m * P.hi)


def polymat_det(P, method="fft"):
    """Determinant of a square Laurent polynomial matrix.

    ``method="fft"`` evaluates det at a power-of-two number of DFT nodes
    (LU with partial pivoting per node) and interpolates.  ``method="direct"``
    expands over permutations with exact polynomial products; it is meant
    for very small orders.  ``method="auto"`` is direct up to order 3.
    """
    m = P.rows
    if P.cols != m:
        raise ValueError("determinant of a non-square matrix")
    if m == 1:
        return P[0, 0]
    if method == "auto":
        method = "direct" if m <= 3 else "fft"
    if method == "direct":
        return _direct_det(P)
    if method != "fft":
        raise ValueError(f"unknown determinant method {method!r}")
    if m >= 20 or _degree(P) >= 25:
        warnings.warn(
            f"determinant of a {m}x{m} matrix of degree {_degree(P)} via DFT "
            "interpolation loses accuracy beyond r<20, n<25",
            ConditioningWarning, stacklevel=2)
    lo, hi = m * P.lo, m * P.hi
    K = next_pow2(hi - lo + 1)
    vals = np.linalg.det(dft_eval(P, K))
    return idft_interpolate(vals, lo, hi)


def cofactor_transpose(P, detP=None):
    """Adjugate Cof{P}^T, so that P @ Cof{P}^T = det(P) I.

    Computed node-wise as det(P(t_l)) P(t_l)^{-1} and interpolated on
    [(m-1) lo, (m-1) hi].
    """
    m = P.rows
    if m == 1:
        return LaurentPolyMatrix.identity(1)
    lo, hi = (m - 1) * P.lo, (m - 1) * P.hi
    K = next_pow2(hi - lo + 1)
    vals = dft_eval(P, K)
    cond = np.linalg.cond(vals)
    bad = ~np.isfinite(cond) | (cond * PIVOT_RTOL > 1.0)
    if np.any(bad):
        l = int(np.nonzero(bad)[0][0])
        raise SingularNodeError(
            f"matrix is numerically singular at node {l} of {K} "
            f"(condition {cond[l]:.3g}); its determinant vanishes near the circle")
    d = detP.values(K) if detP is not None else np.linalg.det(vals)
    adj = np.linalg.inv(vals) * d[:, None, None]
    return idft_interpolate(adj, lo, hi)


def toeplitz_lower(a, m):
    """T(a; m): (l+m+1) x (m+1) Toeplitz matrix with first column [a; 0_m]
    and first row [a_0, 0, ..., 0].

    Multiplying it by the coefficient vector of a degree-m polynomial gives
    the coefficients of the product with the polynomial whose coefficients
    are ``a``.
    """
    a = np.asarray(a, dtype=complex).ravel()
    col = np.concatenate([a, np.zeros(m, dtype=complex)])
    row = np.zeros(m + 1, dtype=complex)
    row[0] = a[0]
    return sla.toeplitz(col, row)


# ---------------------------------------------------------------------------
# dense linear algebra
# ---------------------------------------------------------------------------

def lu_solve(A, B, return_rcond=False):
    """Solve A X = B by LU with partial pivoting.

    Raises SingularMatrixError when a pivot is below PIVOT_RTOL times the
    largest entry of A.  With ``return_rcond`` the LAPACK 1-norm reciprocal
    condition estimate is returned as well.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    scale = np.abs(A).max() if A.size else 0.0
    if scale == 0.0:
        raise SingularMatrixError("zero matrix")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < PIVOT_RTOL * scale:
        raise SingularMatrixError(
            f"pivot {pivots.min():.3g} below threshold {PIVOT_RTOL * scale:.3g}")
    X = sla.lu_solve((lu, piv), B, check_finite=False)
    if not return_rcond:
        return X
    gecon, = sla.get_lapack_funcs(("gecon",), (lu,))
    rcond, _ = gecon(lu, np.linalg.norm(A, 1), norm="1")
    return X, float(rcond)


def _check_hermitian(H, tol):
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    if H.shape[0] != H.shape[1]:
        raise NotHermitianError("matrix is not square")
    scale = max(1.0, float(np.abs(H).max()))
    asym = float(np.abs(H - H.conj().T).max())
    if asym > tol * scale:
        raise NotHermitianError(f"asymmetry {asym:.3g} exceeds tolerance")
    return 0.5 * (H + H.conj().T)


def cholesky_factor(H, tol=1e-10):
    """Lower-triangular L with positive diagonal and L L* = H."""
    H = _check_hermitian(H, tol)
    try:
        return sla.cholesky(H, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from None


def hermitian_principal_sqrt(H, tol=1e-10):
    """Hermitian PSD square root via eigendecomposition.

    Negative eigenvalues down to -tol * ||H|| are clamped to zero.
    """
    H = _check_hermitian(H, tol)
    w, V = np.linalg.eigh(H)
    bound = tol * max(float(np.abs(w).max()), np.finfo(float).tiny)
    if w.min() < -bound:
        raise NotPositiveDefiniteError(
            f"eigenvalue {w.min():.3g} is negative beyond the clamp tolerance")
    w = np.sqrt(np.clip(w, 0.0, None))
    return (V * w) @ V.conj().T

