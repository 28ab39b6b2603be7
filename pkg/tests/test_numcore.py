import numpy as np
import pytest

import oracles
from specfact.errors import (
    AliasError,
    NotHermitianError,
    NotPositiveDefiniteError,
    SingularMatrixError,
    SingularNodeError,
)
from specfact.harness import MatrixFamilySpec, fixture, random_causal
from specfact.numcore import (
    LaurentPoly,
    LaurentPolyMatrix,
    cholesky_factor,
    cofactor_transpose,
    dft_eval,
    hermitian_principal_sqrt,
    idft_interpolate,
    laurent_adjoint,
    laurent_mul,
    lu_solve,
    polymat_det,
    sup_norm,
    toeplitz_lower,
)


def poly(c, lo=0):
    return LaurentPoly(np.asarray(c, dtype=complex), lo)


def mat1(c, lo=0):
    return LaurentPolyMatrix(np.asarray(c, dtype=complex).reshape(-1, 1, 1), lo)


def rand_matrix(rng, r, c, lo, hi):
    coeffs = rng.standard_normal((hi - lo + 1, r, c)) + 1j * rng.standard_normal((hi - lo + 1, r, c))
    return LaurentPolyMatrix(coeffs, lo)


# --- dft_eval / idft_interpolate ------------------------------------------

def test_dft_eval_identity_function_on_four_nodes():
    vals = dft_eval(mat1([0, 1]), 4)[:, 0, 0]
    assert np.allclose(vals, [1, 1j, -1, -1j], atol=1e-15)


def test_dft_eval_constant_on_three_nodes():
    vals = dft_eval(LaurentPolyMatrix.identity(2), 3)
    assert vals.shape == (3, 2, 2)
    assert np.allclose(vals, np.eye(2))


def test_dft_eval_matches_direct_sum_on_ieee0():
    S, _ = fixture("ieee0")
    vals = dft_eval(S, 8)
    for l in range(8):
        z = np.exp(2j * np.pi * l / 8)
        ref = sum(S.coeffs[k] * z ** (S.lo + k) for k in range(S.coeffs.shape[0]))
        assert np.allclose(vals[l], ref, atol=1e-12)
        assert np.allclose(vals[l], vals[l].conj().T, atol=1e-12)
        assert np.linalg.eigvalsh(vals[l]).min() > -1e-12


def test_dft_eval_non_power_of_two_count():
    rng = np.random.default_rng(1)
    P = rand_matrix(rng, 2, 3, -2, 3)
    vals = dft_eval(P, 7)
    for l in range(7):
        z = np.exp(2j * np.pi * l / 7)
        ref = sum(P.coeffs[k] * z ** (P.lo + k) for k in range(6))
        assert np.allclose(vals[l], ref, atol=1e-12)


def test_idft_interpolate_recovers_t():
    vals = np.exp(2j * np.pi * np.arange(4) / 4)
    P = idft_interpolate(vals, 0, 1)
    assert np.allclose(P.coeffs, [0, 1], atol=1e-15)


def test_idft_interpolate_ieee0_determinant():
    z = np.exp(2j * np.pi * np.arange(8) / 8)
    vals = -z ** -2 + 2 - z ** 2
    P = idft_interpolate(vals, -2, 2)
    assert np.allclose(P.coeffs, [-1, 0, 2, 0, -1], atol=1e-14)


def test_idft_interpolate_alias_error():
    with pytest.raises(AliasError):
        idft_interpolate(np.ones(3), -2, 2)


@pytest.mark.parametrize("K", [5, 8, 13, 64])
def test_round_trip(K):
    rng = np.random.default_rng(K)
    P = rand_matrix(rng, 3, 2, -2, 2)
    Q = idft_interpolate(dft_eval(P, K), -2, 2)
    assert sup_norm(Q - P) <= 1e-12


# --- polymat_det -----------------------------------------------------------

# det of random_causal(MatrixFamilySpec(3, 2, 7)) by cofactor expansion
# (tests/oracles.laplace_det), indices 0..6
DET_3x3_SEED7 = [-0.17625221028499047, -0.8272256561338028, 0.7687345618156466,
                 0.5818425186448578, -0.5800215808035059, 0.2430547168908449,
                 -0.47510848524505384]


def test_det_identity():
    d = polymat_det(LaurentPolyMatrix.identity(4))
    assert d.trim(1e-14).window == (0, 0)
    assert abs(d.coef(0) - 1) < 1e-14


@pytest.mark.parametrize("method", ["fft", "direct", "auto"])
def test_det_ieee0(method):
    S, meta = fixture("ieee0")
    d = polymat_det(S, method)
    assert np.allclose(d.restrict(-2, 2).coeffs, [-1, 0, 2, 0, -1], atol=1e-12)


@pytest.mark.parametrize("method", ["fft", "direct"])
def test_det_random_3x3_frozen(method):
    A = random_causal(MatrixFamilySpec(3, 2, 7))
    d = polymat_det(A, method)
    assert d.window == (0, 6)
    assert np.allclose(d.coeffs, DET_3x3_SEED7, atol=1e-10)


def test_det_matches_laplace_oracle_complex():
    rng = np.random.default_rng(3)
    P = rand_matrix(rng, 4, 4, -1, 2)
    E = [[(P.coeffs[:, i, j], P.lo) for j in range(4)] for i in range(4)]
    ref = oracles.on_window(oracles.laplace_det(E), -4, 8)
    assert np.allclose(polymat_det(P, "fft").restrict(-4, 8).coeffs, ref, atol=1e-10)
    assert np.allclose(polymat_det(P, "direct").restrict(-4, 8).coeffs, ref, atol=1e-10)


def test_det_warns_outside_envelope():
    from specfact.errors import ConditioningWarning
    P = LaurentPolyMatrix(np.zeros((27, 2, 2)) + np.eye(2), 0)
    with pytest.warns(ConditioningWarning):
        polymat_det(P, "fft")


# --- cofactor_transpose ----------------------------------------------------

def test_cofactor_one_by_one():
    C = cofactor_transpose(mat1([3, 1]))
    assert C.window == (0, 0) and C.coef(0)[0, 0] == 1


def test_cofactor_two_by_two_adjugate():
    a, b, c, d = poly([3, 1]), poly([0, 1]), poly([1]), poly([2, 0, 1])
    P = LaurentPolyMatrix.from_entries([[a, b], [c, d]])
    C = cofactor_transpose(P)
    ref = LaurentPolyMatrix.from_entries([[d, -b], [-c, a]])
    assert sup_norm(C - ref) <= 1e-12


def test_cofactor_identity_random_3x3():
    A = random_causal(MatrixFamilySpec(3, 2, 7))
    d = polymat_det(A)
    C = cofactor_transpose(A, d)
    R = laurent_mul(A, C) - LaurentPolyMatrix.identity(3) * d.as_matrix()[0, 0]
    assert sup_norm(R) <= 1e-9


def test_cofactor_singular_node():
    # det = 1 - t vanishes at the node t = 1
    P = LaurentPolyMatrix.from_entries(
        [[poly([1, -1]), poly([0]), poly([0])], [poly([0]), poly([1]), poly([0])],
         [poly([0]), poly([0]), poly([1])]])
    with pytest.raises(SingularNodeError):
        cofactor_transpose(P)


# --- toeplitz_lower --------------------------------------------------------

def test_toeplitz_small():
    assert np.array_equal(toeplitz_lower([1, 2], 1), [[1, 0], [2, 1], [0, 2]])


def test_toeplitz_scalar_is_multiple_of_identity():
    assert np.array_equal(toeplitz_lower([5], 2), 5 * np.eye(3))


def test_toeplitz_is_convolution():
    a = np.array([1, 0, -1])
    x = np.array([2.0, -1.0, 3.0])
    assert np.allclose(toeplitz_lower(a, 2) @ x, oracles.conv(a, x))


# --- products and adjoints -------------------------------------------------

def test_mul_scalar_example():
    P = laurent_mul(mat1([2, 1]), mat1([1, 2], -1))
    assert P.window == (-1, 1)
    assert np.allclose(P.coeffs[:, 0, 0], [2, 5, 2])


def test_mul_identity():
    rng = np.random.default_rng(5)
    P = rand_matrix(rng, 3, 3, -2, 1)
    assert sup_norm(laurent_mul(P, LaurentPolyMatrix.identity(3)) - P) == 0


def test_mul_matches_loop_oracle():
    rng = np.random.default_rng(6)
    P = rand_matrix(rng, 2, 3, 0, 50)
    Q = rand_matrix(rng, 3, 2, -4, 60)
    R = laurent_mul(P, Q)
    ref = oracles.matrix_product_coeffs(P.coeffs, Q.coeffs)
    assert R.lo == -4
    assert np.allclose(R.coeffs, ref, atol=1e-11)


def test_ieee0_factor_reproduces_density():
    S, meta = fixture("ieee0")
    F = meta["factor"]
    assert sup_norm(laurent_mul(F, laurent_adjoint(F)) - S) == 0


def test_adjoint_examples():
    H = np.array([[2, 1 - 1j], [1 + 1j, 3]])
    assert np.array_equal(laurent_adjoint(LaurentPolyMatrix.constant(H)).coef(0), H)
    A = laurent_adjoint(mat1([2, 1]))
    assert A.window == (-1, 0)
    assert np.allclose(A.coeffs[:, 0, 0], [1, 2])


def test_adjoint_involution():
    rng = np.random.default_rng(8)
    P = rand_matrix(rng, 2, 3, -1, 4)
    assert sup_norm(laurent_adjoint(laurent_adjoint(P)) - P) == 0
    assert laurent_adjoint(P).shape == (3, 2)


# --- dense linear algebra --------------------------------------------------

def test_lu_solve_trivial_cases():
    B = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.allclose(lu_solve(np.eye(2), B), B)
    assert np.allclose(lu_solve(np.diag([2.0, 4.0]), [2.0, 4.0]), [1, 1])


def test_lu_solve_residual_and_rcond():
    rng = np.random.default_rng(9)
    A = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8)) + 8 * np.eye(8)
    B = rng.standard_normal((8, 3))
    X, rc = lu_solve(A, B, return_rcond=True)
    assert np.abs(A @ X - B).max() <= 1e-12
    assert 0 < rc <= 1


def test_lu_solve_singular():
    with pytest.raises(SingularMatrixError):
        lu_solve(np.array([[1.0, 2.0], [2.0, 4.0]]), np.ones(2))


def test_cholesky_examples():
    assert np.allclose(cholesky_factor(np.eye(3)), np.eye(3))
    assert np.allclose(cholesky_factor(np.diag([4.0, 9.0])), np.diag([2, 3]))
    H = np.array([[2.0, 1.0], [1.0, 2.0]])
    L = cholesky_factor(H)
    assert np.allclose(np.triu(L, 1), 0)
    assert np.all(np.diag(L).real > 0)
    assert np.abs(L @ L.conj().T - H).max() <= 1e-14


def test_cholesky_rejects_indefinite_and_asymmetric():
    with pytest.raises(NotPositiveDefiniteError):
        cholesky_factor(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(NotHermitianError):
        cholesky_factor(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_sqrt_examples():
    assert np.allclose(hermitian_principal_sqrt(np.eye(2)), np.eye(2))
    assert np.allclose(hermitian_principal_sqrt(np.diag([4.0, 9.0])), np.diag([2, 3]))
    H = np.array([[2.0, 1.0], [1.0, 2.0]])
    R = hermitian_principal_sqrt(H)
    assert np.abs(R @ R - H).max() <= 1e-12
    assert np.allclose(R, R.conj().T)
    # eigenvalues of R are the roots of 1 and 3
    assert np.allclose(np.linalg.eigvalsh(R), [1, np.sqrt(3)])


def test_sqrt_clamps_tiny_negative_and_rejects_asymmetry():
    H = np.diag([1.0, -1e-14])
    assert np.allclose(hermitian_principal_sqrt(H), np.diag([1, 0]))
    with pytest.raises(NotHermitianError):
        hermitian_principal_sqrt(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(NotPositiveDefiniteError):
        hermitian_principal_sqrt(np.diag([1.0, -0.5]))
