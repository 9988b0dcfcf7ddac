import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.linalg import expm as scipy_expm

from qsdcocycle.numerics import (DimensionError, block_schur_product, expm, expm_action,
                                 herm_max_eig, herm_min_eig, inv_sqrt_psd, op_norm,
                                 schur_product)

from conftest import cplx

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_expm_zero_is_identity():
    for n in (1, 3, 7):
        assert np.array_equal(expm(np.zeros((n, n))), np.eye(n))


def test_expm_diagonal_closed_form():
    out = expm(np.diag([1j * np.pi, 0.0]))
    assert np.allclose(out, np.diag([-1.0, 1.0]), atol=1e-15)


def test_expm_matches_ode_integration():
    rng = np.random.default_rng(7)
    A = cplx(rng, 6, 6)
    A /= op_norm(A)

    def rhs(_, y):
        return (A @ y.reshape(6, 6)).reshape(-1)

    sol = solve_ivp(rhs, (0.0, 1.0), np.eye(6, dtype=complex).reshape(-1),
                    method="DOP853", rtol=1e-13, atol=1e-15)
    X = sol.y[:, -1].reshape(6, 6)
    assert np.max(np.abs(expm(A) - X)) <= 1e-10


@pytest.mark.parametrize("scale", [1e-4, 0.1, 1.0, 3.0, 20.0, 300.0])
def test_expm_matches_scipy_across_pade_orders(scale):
    rng = np.random.default_rng(int(scale * 100))
    A = scale * cplx(rng, 9, 9) / 3.0
    ref = scipy_expm(A)
    assert np.linalg.norm(expm(A) - ref) <= 1e-12 * max(np.linalg.norm(ref), 1.0) * max(scale, 1.0)


def test_expm_rejects_bad_input():
    with pytest.raises(DimensionError):
        expm(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        expm(np.array([[np.nan]]))


def test_expm_action_matches_dense():
    rng = np.random.default_rng(3)
    A = cplx(rng, 5, 5)
    X = cplx(rng, 5, 2)
    out = expm_action(lambda Y: A @ Y, X, 1.7, op_norm(A))
    assert np.allclose(out, expm(1.7 * A) @ X, rtol=0, atol=1e-11 * op_norm(expm(1.7 * A) @ X))


def test_expm_action_trivial_cases():
    X = np.ones((2, 2))
    assert np.array_equal(expm_action(lambda Y: Y, X, 0.0, 1.0), X)
    assert np.array_equal(expm_action(lambda Y: 0 * Y, X, 2.0, 0.0), X)
    with pytest.raises(ValueError):
        expm_action(lambda Y: Y, X, -1.0, 1.0)


def test_herm_max_eig_examples():
    assert herm_max_eig(np.diag([-1.0, -3.0])) == -1.0
    assert herm_max_eig(np.zeros((4, 4))) == 0.0
    assert herm_min_eig(np.diag([-1.0, -3.0])) == -3.0


def test_herm_max_eig_rayleigh_oracle():
    rng = np.random.default_rng(11)
    H = cplx(rng, 8, 8)
    H = 0.5 * (H + H.conj().T)
    lam = herm_max_eig(H)
    V = cplx(rng, 8, 10_000)
    V /= np.linalg.norm(V, axis=0)
    rq = np.real(np.einsum("ik,ij,jk->k", V.conj(), H, V))
    assert rq.max() <= lam + 1e-8
    # power iteration on a shifted matrix reaches the top of the spectrum
    shift = np.abs(H).sum() + 1.0
    x = V[:, 0]
    for _ in range(5000):
        x = (H + shift * np.eye(8)) @ x
        x /= np.linalg.norm(x)
    assert abs(np.real(np.vdot(x, H @ x)) - lam) <= 1e-8


def test_herm_max_eig_symmetrizes():
    A = np.array([[0.0, 2.0], [0.0, 0.0]])
    assert herm_max_eig(A) == pytest.approx(1.0, abs=1e-15)


def test_op_norm_examples():
    assert op_norm(np.eye(5)) == pytest.approx(1.0, abs=1e-15)
    assert op_norm(np.diag([3.0, -4.0])) == pytest.approx(4.0, abs=1e-14)
    assert op_norm(np.zeros((0, 0))) == 0.0
    rng = np.random.default_rng(5)
    A = cplx(rng, 5, 7)
    assert op_norm(A) == pytest.approx(np.sqrt(herm_max_eig(A.conj().T @ A)), abs=1e-10)


def test_schur_product_examples():
    rng = np.random.default_rng(2)
    A = cplx(rng, 3, 3)
    assert np.array_equal(schur_product(A, np.ones((3, 3))), A)
    assert np.array_equal(schur_product(np.eye(3), A), np.diag(np.diag(A)))
    A = np.array([[1 + 2j, -1.0], [0.5j, 3.0]])
    B = np.array([[2.0, 1j], [4.0, -1 - 1j]])
    expected = np.empty((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            expected[i, j] = A[i, j] * B[i, j]
    assert np.array_equal(schur_product(A, B), expected)
    assert np.array_equal(schur_product(np.array([[2.0]]), A), 2 * A)
    with pytest.raises(DimensionError):
        schur_product(np.ones((2, 2)), np.ones((3, 3)))


def test_block_schur_product_layout():
    S = np.array([[1.0, 2.0], [3.0, 4.0]])
    blocks = np.arange(2 * 2 * 2 * 1).reshape(2, 2, 2, 1).astype(complex)
    out = block_schur_product(S, blocks)
    assert out.shape == (4, 2)
    for i in range(2):
        for j in range(2):
            assert np.array_equal(out[2 * i:2 * i + 2, j:j + 1], S[i, j] * blocks[i, j])


def test_inv_sqrt_psd():
    rng = np.random.default_rng(8)
    X = cplx(rng, 4, 4)
    A = X @ X.conj().T + np.eye(4)
    R = inv_sqrt_psd(A)
    assert np.allclose(R @ A @ R, np.eye(4), atol=1e-12)
    with pytest.raises(ValueError, match="not positive definite"):
        inv_sqrt_psd(-np.eye(2), "B")


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_expm_commuting_sum(seed):
    rng = np.random.default_rng(seed)
    a = cplx(rng, 5)
    b = cplx(rng, 5)
    A, B = np.diag(a), np.diag(b)
    assert np.allclose(expm(A + B), expm(A) @ expm(B), rtol=1e-10, atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(seeds, st.floats(0, 5), st.floats(0, 5))
def test_expm_semigroup_law(seed, s, t):
    rng = np.random.default_rng(seed)
    G = cplx(rng, 5, 5) / 3.0
    G = G - (herm_max_eig(G) + 0.1) * np.eye(5)
    lhs = expm((s + t) * G)
    assert np.max(np.abs(lhs - expm(s * G) @ expm(t * G))) <= 1e-10


@settings(max_examples=50, deadline=None)
@given(seeds, st.floats(0, 100))
def test_dissipative_generates_contractions(seed, t):
    rng = np.random.default_rng(seed)
    G = cplx(rng, 6, 6)
    G = G - herm_max_eig(G) * np.eye(6)
    assert herm_max_eig(G) <= 1e-12
    assert op_norm(expm(t * G)) <= 1 + 1e-10


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_op_norm_submultiplicative(seed):
    rng = np.random.default_rng(seed)
    A = cplx(rng, 4, 6)
    B = cplx(rng, 6, 3)
    assert op_norm(A @ B) <= op_norm(A) * op_norm(B) + 1e-10
