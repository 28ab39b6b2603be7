"""Factor the two golden fixtures and watch where the accuracy goes.

Both densities have determinants that vanish on the unit circle, which is
the hard case for every method here.  Run with ``python3 demos/fixtures.py``.
"""

import warnings

from specfact import AlgoParams, fixture, jle1, jle2, jle3, wilson
from specfact.errors import NumericalError
from specfact.msf import normalize_at_zero
from specfact.numcore import sup_norm

warnings.simplefilter("ignore")

# ieee0 has a known factor with integer coefficients.
S, meta = fixture("ieee0")
print("ieee0 density window", S.window, " det =", meta["det"].coeffs.real)
# the printed factor has a non-Hermitian constant term; rotate it into the
# canonical one (Hermitian positive definite at the origin) before comparing
canon = normalize_at_zero(meta["factor"])

# The determinant path matters most.  Interpolating det S from samples
# puts noise on coefficients that should be exact, and the scalar factor
# of a determinant with zeros on the circle amplifies that noise.
for label, p in [
    ("fft det, 5 scalar steps", AlgoParams(det_method="fft", scalar_iters=5)),
    ("direct det, 45 scalar steps", AlgoParams(det_method="direct", scalar_iters=45,
                                               N_schedule=30)),
]:
    res = jle1(S, p)
    print(f"  jle1 {label:28s} err {res.err:.2e}  "
          f"distance to known factor {sup_norm(res.Splus - canon):.2e}")

res = wilson(S, AlgoParams(wilson_iters=40))
print(f"  wilson, 40 iterations{'':13s} err {res.err:.2e}")

# JLE-3 refuses: its linear system is singular when det S has zeros on T.
try:
    jle3(S)
except NumericalError as exc:
    print(f"  jle3 -> {type(exc).__name__}")

# sa4 is degree 3 with a determinant of order 4 at +-1 and order 2 at +-i.
S, meta = fixture("sa4")
print("\nsa4 alpha =", round(meta["alpha"], 6))
for iters in (5, 20, 60):
    res = jle1(S, AlgoParams(scalar_iters=iters))
    print(f"  jle1, {iters:2d} scalar steps  err {res.err:.2e}")
res = jle2(S, AlgoParams(scalar_iters=60))
print(f"  jle2, 60 scalar steps  err {res.err:.2e}")
