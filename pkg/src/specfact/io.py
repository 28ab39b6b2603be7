"""Coefficient files: UTF-8 JSON with explicit (re, im) pairs.

Layout::

    {"format": "specfact-coeffs/1", "kind": "density" | "factor",
     "r": 2, "cols": 2, "lo": -1, "hi": 1,
     "coeffs": [[[[re, im], ...], ...], ...]}

``coeffs[k - lo][i][j]`` is entry (i, j) of the coefficient of t**k.
Floats are written with ``repr`` precision, so a save/load round trip is
bit-exact for finite values.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import SchemaError
from .numcore import LaurentPolyMatrix

__all__ = ["FORMAT", "to_dict", "from_dict", "save_coeffs", "load_coeffs"]

FORMAT = "specfact-coeffs/1"
KINDS = ("density", "factor")


def to_dict(P, kind="density"):
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    c = np.asarray(P.coeffs, dtype=complex)
    pairs = np.stack([c.real, c.imag], axis=-1)
    return {"format": FORMAT, "kind": kind, "r": int(P.rows), "cols": int(P.cols),
            "lo": int(P.lo), "hi": int(P.hi), "coeffs": pairs.tolist()}


def _int(doc, key):
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemaError(f"field {key!r} must be an integer, got {v!r}")
    return v


def from_dict(doc, kind=None, sym_tol=1e-10):
    """Validate a decoded document and build the polynomial matrix.

    Densities must pass the Hermitian symmetry check at relative tolerance
    ``sym_tol``; factors must start at index 0.
    """
    if not isinstance(doc, dict):
        raise SchemaError("top level must be a JSON object")
    if doc.get("format") != FORMAT:
        raise SchemaError(f"format tag must be {FORMAT!r}, got {doc.get('format')!r}")
    got = doc.get("kind", "density")
    if got not in KINDS:
        raise SchemaError(f"kind must be one of {KINDS}, got {got!r}")
    if kind is not None and got != kind:
        raise SchemaError(f"expected a {kind} file, got a {got} file")
    r, cols, lo, hi = (_int(doc, k) for k in ("r", "cols", "lo", "hi"))
    if r < 1 or cols < 1 or hi < lo:
        raise SchemaError(f"bad shape r={r}, cols={cols}, window [{lo}, {hi}]")
    try:
        arr = np.array(doc["coeffs"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"coeffs is not a numeric array: {exc}") from None
    want = (hi - lo + 1, r, cols, 2)
    if arr.shape != want:
        raise SchemaError(f"coeffs has shape {arr.shape}, expected {want}")
    P = LaurentPolyMatrix(arr[..., 0] + 1j * arr[..., 1], lo)
    if got == "factor" and lo != 0:
        raise SchemaError(f"factor files must start at index 0, got lo={lo}")
    if got == "density":
        if r != cols:
            raise SchemaError(f"density must be square, got {r} x {cols}")
        if not P.is_hermitian(sym_tol):
            raise SchemaError("density fails the Hermitian symmetry check")
    return P


def save_coeffs(P, path, kind="density"):
    c = np.asarray(P.coeffs)
    if not (np.all(np.isfinite(c.real)) and np.all(np.isfinite(c.imag))):
        raise ValueError("refusing to write non-finite coefficients")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_dict(P, kind), fh)
        fh.write("\n")


def load_coeffs(path, kind=None, sym_tol=1e-10):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    return from_dict(doc, kind, sym_tol)


def _reject_constant(name):
    raise SchemaError(f"non-finite value {name} in coefficient file")

