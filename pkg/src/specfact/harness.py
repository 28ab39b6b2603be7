"""Test densities, golden fixtures and the benchmark runner.

Random densities are ``A(t) A(t)^* + shift I`` with ``A(t) = sum_k A_k t^k``
and entries of ``A_k`` uniform on [-1, 1].  The entries come from the
SplitMix64 generator so that a seed names the same matrix in any language:

    state_i = seed + (i + 1) * 0x9E3779B97F4A7C15          (mod 2**64)
    z = state_i
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z = z ^ (z >> 31)
    u_i = (z >> 11) * 2**-53                                 in [0, 1)

and ``A_k[i, j] = 2 u - 1`` with draw index ``u = k*r*r + i*r + j``.
"""

from __future__ import annotations

import json
import time
import traceback
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .errors import SpecfactError, UnknownFixtureError
from .msf import AlgoParams, factorization_error, jle1, jle2, jle3, wilson
from .numcore import LaurentPoly, LaurentPolyMatrix, laurent_adjoint

__all__ = [
    "splitmix64",
    "uniform",
    "MatrixFamilySpec",
    "random_causal",
    "random_spd",
    "fixture",
    "FIXTURES",
    "factorization_error",
    "BenchRow",
    "BenchCase",
    "run_bench",
    "preset",
    "PRESETS",
    "write_report",
    "wilson_then_jle2",
    "ALGORITHMS",
]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed, count):
    """First ``count`` outputs of SplitMix64 started from ``seed``."""
    i = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(int(seed) % (1 << 64)) + i * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def uniform(seed, count, low=-1.0, high=1.0):
    u = (splitmix64(seed, count) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53
    return low + (high - low) * u


@dataclass(frozen=True)
class MatrixFamilySpec:
    """Random density family: r x r, degree n, seed, shift * I added."""

    r: int
    n: int
    seed: int = 0
    shift: float = 0.0

    def __post_init__(self):
        if self.r < 1 or self.n < 0:
            raise ValueError("need r >= 1 and n >= 0")
        if self.shift < 0:
            raise ValueError("shift must be nonnegative")


def random_causal(spec):
    """The causal polynomial matrix A(t) of a family spec."""
    r, n = spec.r, spec.n
    a = uniform(spec.seed, (n + 1) * r * r).reshape(n + 1, r, r)
    return LaurentPolyMatrix(a.astype(complex), 0)


def random_spd(spec):
    A = random_causal(spec)
    S = A * laurent_adjoint(A)
    if spec.shift:
        S = S + LaurentPolyMatrix.constant(spec.shift * np.eye(spec.r))
    return S


def _poly(coeffs, lo):
    return LaurentPoly(np.asarray(coeffs, dtype=complex), lo)


def _ieee0():
    P = lambda *c: _poly(c, 0)
    F = LaurentPolyMatrix.from_entries([[P(2, 1), P(1)], [P(7, 5), P(3, 1)]])
    S = LaurentPolyMatrix.from_entries([
        [_poly([2, 6, 2], -1), _poly([11, 22, 7], -1)],
        [_poly([7, 22, 11], -1), _poly([38, 84, 38], -1)],
    ])
    meta = {
        "name": "ieee0",
        "factor": F,
        "det": _poly([-1, 0, 2, 0, -1], -2),
        "singular": True,
    }
    return S, meta


def _sa4():
    a = 4 + np.sqrt(15.0)
    ab = 4 - np.sqrt(15.0)
    u = (1 - 4 * ab) / 64
    v = (1 + 4 * a) / 64
    s11 = _poly([-u, 0, v, 1, v, 0, -u], -3)
    s22 = _poly([u, 0, -v, 1, -v, 0, u], -3)
    s12 = _poly([ab / 16, 0, -a / 16, 0, a / 16, 0, -ab / 16], -3)
    s21 = _poly(s12.coeffs[::-1], -3)
    S = LaurentPolyMatrix.from_entries([[s11, s12], [s21, s22]])
    # (z+1)^4 (z-1)^4 (z+i)^2 (z-i)^2 = (z^2-1)^4 (z^2+1)^2, times z^-6
    c = (8 * ab - 1) / 4096
    p = np.polynomial.polynomial
    z2m1 = [-1, 0, 1]
    z2p1 = [1, 0, 1]
    det = c * p.polymul(p.polypow(z2m1, 4), p.polypow(z2p1, 2))
    meta = {"name": "sa4", "alpha": a, "det": _poly(det, -6), "singular": True}
    return S, meta


FIXTURES = {"ieee0": _ieee0, "sa4": _sa4}


def fixture(name):
    """Golden density by name ('ieee0' or 'sa4') and its metadata."""
    try:
        return FIXTURES[name]()
    except KeyError:
        raise UnknownFixtureError(f"unknown fixture {name!r}; known: {sorted(FIXTURES)}") from None


def wilson_then_jle2(S, params=None):
    """Hybrid: Wilson on the leading (r-1) x (r-1) block, then one JLE-2 step."""
    params = params or AlgoParams()
    r = S.rows
    if r == 1:
        return wilson(S, params)
    lead = wilson(S.leading_submatrix(r - 1), params)
    res = jle2(S, params, initial=lead.Splus)
    res.diagnostics["algorithm"] = "wil+jle"
    res.diagnostics["leading_err"] = lead.err
    return res


ALGORITHMS = {
    "jle1": jle1,
    "jle2": jle2,
    "jle3": lambda S, params=None: jle3(S, params),
    "wilson": wilson,
    "wil+jle": wilson_then_jle2,
}


@dataclass
class BenchCase:
    """One benchmark input: a random family or a fixture, plus the
    algorithms (with optional per-algorithm parameter overrides) to run."""

    algs: list
    family: MatrixFamilySpec | None = None
    fixture: str | None = None
    params: dict = field(default_factory=dict)


@dataclass
class BenchRow:
    alg: str
    r: int
    n: int
    seed: int | None
    params: dict
    time_s: float
    err: float | None
    status: str
    input: str = "random"
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(_clean(asdict(self)))


def _clean(x: Any):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, float) and not np.isfinite(x):
        return None
    return x


def _summary(res):
    steps = res.steps
    out = {"seconds": res.diagnostics.get("seconds")}
    if steps:
        def worst(key):
            vals = [getattr(s, key) for s in steps if getattr(s, key, None) is not None]
            return max(vals) if vals else None
        out.update(max_unitary_defect=worst("unitary_defect"),
                   max_causality_defect=worst("causality_defect"),
                   min_rcond_V=min((s.rcond_V for s in steps if s.rcond_V is not None),
                                   default=None),
                   node_fallbacks=sum(s.node_fallbacks for s in steps))
    for k in ("iterations", "delta_rcond", "stopped"):
        if k in res.diagnostics:
            out[k] = res.diagnostics[k]
    return out


def run_bench(cases, on_row=None):
    """Run every case; each input is generated once and shared by all of
    its algorithms.  Failures become rows with status 'error: ...'."""
    rows = []
    for case in cases:
        if case.fixture is not None:
            S, _ = fixture(case.fixture)
            seed, label = None, case.fixture
        else:
            S = random_spd(case.family)
            seed, label = case.family.seed, "random" + (
                f"+{case.family.shift:g}I" if case.family.shift else "")
        n = max(S.hi, 0)
        for alg in case.algs:
            name, over = (alg, {}) if isinstance(alg, str) else alg
            kw = {**case.params, **over}
            t0 = time.perf_counter()
            try:
                params = AlgoParams(**kw)
                res = ALGORITHMS[name](S, params)
                row = BenchRow(name, S.rows, n, seed, params.snapshot(),
                               time.perf_counter() - t0, res.err, "ok", label,
                               _summary(res))
            except (SpecfactError, ValueError, KeyError, np.linalg.LinAlgError) as exc:
                row = BenchRow(name, S.rows, n, seed, kw, time.perf_counter() - t0,
                               None, f"error: {type(exc).__name__}: {exc}", label,
                               {"traceback": traceback.format_exc(limit=3)})
            rows.append(row)
            if on_row is not None:
                on_row(row)
    return rows


def _sweep(shapes, seeds, algs, shift=0.0, params=None, per_shape=None):
    cases = []
    for r, n in shapes:
        extra = per_shape(r, n) if per_shape else {}
        for s in range(seeds):
            cases.append(BenchCase([(a, extra.get(a, {})) for a in algs],
                                   MatrixFamilySpec(r, n, s, shift), params=dict(params or {})))
    return cases


def preset(name, seeds=None):
    """Named benchmark configurations sized for a desktop machine.

    ``seeds`` overrides the number of seeds per shape.
    """
    def count(default):
        return default if seeds is None else int(seeds)

    if name == "table1":
        return _sweep([(4, 30), (6, 20), (8, 10), (10, 5)], count(10),
                      ["jle3", "jle1", "wilson"], per_shape=_table1_tuning)
    if name == "table2":
        return _sweep([(15, 20)], count(1), ["jle1", "wilson"],
                      per_shape=lambda r, n: {
                          "jle1": {"N_schedule": _HundredM()},
                          "wilson": {"kappa": 11, "wilson_iters": 25}})
    if name == "table3-desk":
        return _sweep([(10, 5), (15, 5)], count(2), ["jle2", "wilson", "wil+jle"],
                      params={"kappa": 11, "wilson_iters": 30})
    if name == "table4-desk":
        return _sweep([(20, 10)], count(5), ["jle2", "wilson"], shift=1.0,
                      params={"kappa": 11, "wilson_iters": 30})
    if name == "singular":
        return [BenchCase(["jle1", "jle2", "jle3", "wilson"], fixture=f,
                          params={"scalar_iters": 60, "N_schedule": 100})
                for f in ("ieee0", "sa4")]
    raise KeyError(f"unknown preset {name!r}; known: {PRESETS}")


def _table1_tuning(r, n):
    # the degree-30 case has determinant zeros close to the circle: JLE-1
    # needs longer truncations there
    wil = {"kappa": 11, "wilson_iters": 20}
    if n >= 30:
        return {"jle1": {"N_schedule": _MultipleOfMN(10, n)}, "wilson": wil}
    return {"jle1": {}, "wilson": wil}


class _MultipleOfMN:
    """N(m) = c m n."""

    def __init__(self, c, n):
        self.c, self.n = c, n
        self.__name__ = f"{c}*m*n"

    def __call__(self, m):
        return self.c * m * self.n


class _HundredM:
    """N(m) = 100 m."""

    __name__ = "100*m"

    def __call__(self, m):
        return 100 * m


PRESETS = ("table1", "table2", "table3-desk", "table4-desk", "singular")


def write_report(rows, path):
    """JSON-lines report, one BenchRow per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(row.to_json() + "\n")
