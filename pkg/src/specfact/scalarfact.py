"""Scalar spectral factorization.

The exp-log (cepstral) construction of the outer factor is computed on a
DFT grid and then polished with a few steps of Wilson's scalar Newton
iteration.  Rational causal functions p/q (q zero-free in the open disk)
are expanded into Fourier coefficients over an index window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.signal import lfilter

from .errors import DivergenceError, NonPositiveSampleError, PoleOnCircleError
from .numcore import LaurentPoly, _coeffs_from_values, next_pow2

__all__ = [
    "EPS_FLOOR",
    "DensitySamples",
    "RationalCausal",
    "sample_density",
    "grid_plus_half",
    "scalar_factor_explog",
    "wilson_scalar_refine",
    "scalar_factor",
    "causal_expand",
    "scalar_grid_size",
]

EPS_FLOOR = 1e-15
# scalar factorization grid: half-shifted so that the nodes miss +-1, +-i
DEFAULT_OFFSET = 0.5
DEFAULT_GRID = 512


@dataclass(frozen=True, eq=False)
class DensitySamples:
    """Positive samples of a spectral density on a K-point DFT grid.

    Attributes
    ----------
    values : ndarray, shape (K,)
        Density values, all > 0 after flooring.
    floor_applied : bool
        True if some raw sample was raised to the floor.
    offset : float
        Grid offset, nodes are ``exp(2j*pi*(l + offset)/K)``.
    """

    values: np.ndarray
    floor_applied: bool = False
    offset: float = 0.0

    @property
    def K(self):
        return self.values.shape[0]

    @classmethod
    def from_values(cls, values, offset=0.0, floor=True):
        v = np.real(np.asarray(values, dtype=complex)).astype(float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("need at least two samples")
        top = v.max()
        if top <= 0:
            raise NonPositiveSampleError("density is nowhere positive")
        eps = EPS_FLOOR * top
        low = v < eps
        if np.any(low):
            if not floor:
                raise NonPositiveSampleError(
                    f"{int(low.sum())} samples are below {eps:.3g}")
            v = np.where(low, eps, v)
        return cls(v, bool(np.any(low)), float(offset))


@dataclass(frozen=True, eq=False)
class RationalCausal:
    """The function p/q where q is causal and zero-free in the open disk.

    ``p`` may carry negative indices; ``q`` must have ``lo == 0``.
    """

    p: LaurentPoly
    q: LaurentPoly

    def __post_init__(self):
        if self.q.lo != 0:
            raise ValueError("denominator must be causal (lo == 0)")
        if self.q.coef(0) == 0:
            raise ValueError("denominator vanishes at the origin")

    def __call__(self, z):
        return self.p(z) / self.q(z)

    def values(self, K, offset=0.0):
        return self.p.values(K, offset) / self.q.values(K, offset)

    def denominator_roots_ok(self, tol=1e-6):
        """Root check that q has no zeros in the open disk (small degree)."""
        q = self.q.trim()
        if q.hi == 0:
            return True
        roots = np.roots(q.coeffs[::-1])
        return bool(np.all(np.abs(roots) >= 1 - tol))


def sample_density(density, K, offset=DEFAULT_OFFSET, floor=True):
    return DensitySamples.from_values(density.values(K, offset), offset, floor)


def scalar_grid_size(density, K=DEFAULT_GRID):
    """Grid size used for a scalar factorization of ``density``."""
    return max(int(K), next_pow2(8 * (density.hi - density.lo + 1)))


def grid_plus_half(values):
    """[.]+ on grid values: keep positive frequencies, halve index 0 (and the
    Nyquist bin), drop negative ones.  Works along the first axis."""
    values = np.asarray(values, dtype=complex)
    K = values.shape[0]
    spec = np.fft.fft(values, axis=0)
    spec[0] *= 0.5
    if K % 2 == 0:
        spec[K // 2] *= 0.5
        spec[K // 2 + 1:] = 0
    else:
        spec[(K + 1) // 2:] = 0
    return np.fft.ifft(spec, axis=0)


def _normalize_phase(coeffs):
    c0 = coeffs[0]
    if c0 == 0:
        return coeffs
    out = coeffs * (abs(c0) / c0)
    out[0] = abs(c0)
    return out


def scalar_factor_explog(samples, M):
    """Outer factor of degree M from boundary samples via the cepstrum.

    log S is split as log f + conj(log f) with log f the causal half of the
    cepstrum (constant term halved); f = exp(log f) is sampled on the same
    grid and its first M+1 Fourier coefficients are returned.
    """
    if M >= samples.K:
        raise ValueError(f"output degree {M} needs more than {samples.K} nodes")
    logf = grid_plus_half(np.log(samples.values))
    coeffs = _coeffs_from_values(np.exp(logf), 0, M, samples.offset)
    return LaurentPoly(_normalize_phase(coeffs), 0)


def _residual(density, f):
    return (density - f * f.adjoint()).norm()


def _newton_update(c, f):
    """One Wilson/Newton step in coefficient space.

    Solves f* x + f x* = c + f f* on indices 0..M for the new iterate x, as
    a real system of order 2(M+1); Im x_0 = 0 pins the free phase.
    """
    M = f.shape[0] - 1
    zeros = np.zeros(M, dtype=complex)
    H1 = sla.toeplitz(np.concatenate([[np.conj(f[0])], zeros]), np.conj(f))
    H2 = sla.hankel(f)
    P, Q = H1 + H2, H1 - H2
    A = np.block([[P.real, -Q.imag], [P.imag, Q.real]])
    ff = np.array([np.dot(f[k:], np.conj(f[:M + 1 - k])) for k in range(M + 1)])
    rhs = c + ff
    b = np.concatenate([rhs.real, rhs.imag])
    A[M + 1, :] = 0.0
    A[M + 1, M + 1] = 1.0
    b[M + 1] = 0.0
    x = np.linalg.solve(A, b)
    return x[:M + 1] + 1j * x[M + 1:]


def _grid_update(d, f, K, offset):
    M = f.shape[0] - 1
    fv = LaurentPoly(f, 0).values(K, offset)
    mod2 = np.abs(fv) ** 2
    safe = mod2 > np.finfo(float).tiny
    g = np.where(safe, d / np.where(safe, mod2, 1.0), 1.0) + 1.0
    return _coeffs_from_values(fv * grid_plus_half(g), 0, M, offset)


def wilson_scalar_refine(density, f0, iters, method="newton", K=None,
                         offset=DEFAULT_OFFSET, return_history=False):
    """Wilson's scalar iteration f <- f [density/(f f*) + 1]_+.

    ``method="newton"`` runs the iteration as Newton's method on the
    coefficients of f (degree fixed to that of ``f0``): every step solves a
    small real linear system and no grid is involved, so zeros of the
    density on the unit circle only slow convergence down to a linear rate.
    ``method="grid"`` evaluates the bracket on a K-point grid and truncates
    the product back to the degree of ``f0``.

    Iteration stops once the update is at round-off level or has failed to
    shrink three times in a row.  A DivergenceError is raised when the
    residual ||density - f f*|| rises three times in a row and ends above
    its starting value.
    """
    M = f0.hi
    if f0.lo != 0:
        raise ValueError("initial factor must be causal")
    if method == "grid":
        if K is None:
            K = scalar_grid_size(density)
        d = np.real(density.values(K, offset))
    elif method == "newton":
        c = density.restrict(0, M).coeffs
    else:
        raise ValueError(f"unknown refinement method {method!r}")
    f = _normalize_phase(f0.coeffs.copy())
    res0 = _residual(density, LaurentPoly(f, 0))
    history = [res0]
    rises = stalls = 0
    last_step = np.inf
    noise = 1e-14 * density.norm()
    for _ in range(int(iters)):
        try:
            if method == "newton":
                new = _newton_update(c, f)
            else:
                new = _grid_update(d, f, K, offset)
        except np.linalg.LinAlgError:
            break
        new = _normalize_phase(new)
        step = float(np.abs(new - f).max())
        f = new
        res = _residual(density, LaurentPoly(f, 0))
        rises = rises + 1 if res > history[-1] else 0
        history.append(res)
        if rises >= 3 and res > max(res0, 100 * noise):
            raise DivergenceError(
                f"scalar Wilson residual rose to {res:.3g} (start {res0:.3g})")
        stalls = stalls + 1 if step >= last_step else 0
        last_step = step
        if step <= 4 * np.finfo(float).eps * np.abs(f).max() or stalls >= 3:
            break
    f = LaurentPoly(f, 0)
    if return_history:
        return f, history
    return f


def scalar_factor(density, K=DEFAULT_GRID, iters=5, offset=DEFAULT_OFFSET,
                  method="newton"):
    """Spectral factor of a nonnegative Hermitian Laurent polynomial.

    Samples the density, builds the exp-log factor of degree ``density.hi``
    and refines it with ``iters`` Wilson steps.
    """
    if density.hi < 0 or density.lo > 0:
        raise ValueError("density window must contain index 0")
    if density.hi == 0 and density.lo == 0:
        c = density.coef(0).real
        if c <= 0:
            raise NonPositiveSampleError("constant density is not positive")
        return LaurentPoly.constant(np.sqrt(c))
    K = scalar_grid_size(density, K)
    f0 = scalar_factor_explog(sample_density(density, K, offset), density.hi)
    if iters <= 0:
        return f0
    return wilson_scalar_refine(density, f0, iters, method=method, K=K,
                                offset=offset)


def causal_expand(f, lo, hi):
    """Fourier coefficients of p/q on the window [lo, hi].

    1/q is expanded as a power series by the triangular recursion (q is
    zero-free in the open disk, so this is its boundary Fourier series),
    then convolved with p.
    """
    p, q = f.p, f.q
    if hi < lo:
        raise ValueError("hi < lo")
    Kchk = max(64, next_pow2(4 * (q.hi + 1)))
    qv = np.abs(q.values(Kchk))
    if qv.min() <= 1e-14 * qv.max():
        raise PoleOnCircleError("denominator underflows on the unit circle")
    L = hi - p.lo + 1
    if L <= 0:
        return LaurentPoly(np.zeros(hi - lo + 1, dtype=complex), lo)
    impulse = np.zeros(L, dtype=complex)
    impulse[0] = 1.0
    b = lfilter([1.0], q.coeffs, impulse)
    full = LaurentPoly(np.convolve(p.coeffs, b)[:L], p.lo)
    return full.restrict(lo, hi)
