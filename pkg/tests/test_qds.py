import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from qsdcocycle import models, qds
from qsdcocycle.generator import (DimensionError, GeneratorMatrix, NoiseBasis, deficit_operator,
                                  journe_dual, max_form_deficit)
from qsdcocycle.numerics import herm_max_eig, op_norm
from qsdcocycle.qds import (UnitarityReport, choi_matrix, conservativity_defect, cp_check,
                            lindblad_apply, qds_evolve, superoperator, unitarity_report)

from conftest import (cplx, drift_only, random_contractive_generator,
                      random_isometric_generator)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def lindblad_loop_oracle(F, X):
    """Entry ``(k, l)`` is ``<e_k, X F00 e_l> + <F00 e_k, X e_l> + sum_i <Fi0 e_k, X Fi0 e_l>``."""
    m = F.h_dim
    E = np.eye(m)
    out = np.zeros((m, m), dtype=complex)
    for k in range(m):
        for l in range(m):
            val = np.vdot(E[k], X @ F.block(0, 0) @ E[l]) + np.vdot(F.block(0, 0) @ E[k], X @ E[l])
            for i in range(1, F.noise_dim + 1):
                J = F.block(i, 0)
                val += np.vdot(J @ E[k], X @ J @ E[l])
            out[k, l] = val
    return out


def test_lindblad_apply_examples():
    rng = np.random.default_rng(0)
    X = cplx(rng, 3, 3)
    assert np.array_equal(lindblad_apply(GeneratorMatrix.zeros(3, 2), X), np.zeros((3, 3)))
    F = GeneratorMatrix(3, NoiseBasis(2), cplx(rng, 9, 9))
    assert np.max(np.abs(lindblad_apply(F, X) - lindblad_loop_oracle(F, X))) <= 1e-12
    with pytest.raises(DimensionError):
        lindblad_apply(F, np.eye(2))


def test_lindblad_of_identity_is_deficit_corner():
    rng = np.random.default_rng(1)
    F = GeneratorMatrix(3, NoiseBasis(2), cplx(rng, 9, 9))
    corner = deficit_operator(F)[:3, :3]
    assert np.max(np.abs(lindblad_apply(F, np.eye(3)) - corner)) <= 1e-13
    shg = models.shg(6, 6)
    LI = lindblad_apply(shg, np.eye(36))
    mask = np.asarray(shg.interior_mask(3).kept)
    assert np.max(np.abs(LI[np.ix_(mask, mask)])) <= 1e-10


def test_superoperator_matches_apply_and_is_cached():
    rng = np.random.default_rng(2)
    F = GeneratorMatrix(3, NoiseBasis(1), cplx(rng, 6, 6))
    S = superoperator(F)
    assert superoperator(F) is S
    X = cplx(rng, 3, 3)
    assert np.allclose(S.apply(X), lindblad_apply(F, X), atol=1e-13)
    # adjoint preservation on the matrix-unit basis
    for k in range(3):
        for l in range(3):
            E = np.zeros((3, 3))
            E[k, l] = 1
            assert np.allclose(S.apply(E.T).conj().T, S.apply(E), atol=1e-13)


def test_qds_evolve_examples():
    rng = np.random.default_rng(3)
    F = random_contractive_generator(rng, 3, 2)
    X = cplx(rng, 3, 3)
    assert np.allclose(qds_evolve(F, X, 0.0), X, atol=1e-15)
    assert np.allclose(qds_evolve(GeneratorMatrix.zeros(3, 2), X, 4.0), X, atol=1e-15)
    s, t = 0.4, 1.3
    lhs = qds_evolve(F, X, s + t)
    assert np.max(np.abs(lhs - qds_evolve(F, qds_evolve(F, X, t), s))) <= 1e-10
    with pytest.raises(ValueError):
        qds_evolve(F, X, -1.0)
    with pytest.raises(ValueError):
        qds_evolve(F, X, 1.0, method="nope")


def test_dense_and_action_agree():
    rng = np.random.default_rng(4)
    F = random_contractive_generator(rng, 5, 2, scale=2.0)
    X = cplx(rng, 5, 5)
    for t in (0.1, 1.0, 3.0):
        dense = qds_evolve(F, X, t, "dense")
        action = qds_evolve(F, X, t, "action")
        assert np.max(np.abs(dense - action)) <= 1e-11 * max(1.0, np.abs(dense).max())


def test_master_equation_ode_oracle():
    rng = np.random.default_rng(5)
    F = random_contractive_generator(rng, 3, 1)
    X = cplx(rng, 3, 3)

    def rhs(_, y):
        return lindblad_apply(F, y.reshape(3, 3)).reshape(-1)

    sol = solve_ivp(rhs, (0.0, 1.0), X.reshape(-1), method="DOP853", rtol=1e-13, atol=1e-14)
    assert np.max(np.abs(qds_evolve(F, X, 1.0) - sol.y[:, -1].reshape(3, 3))) <= 1e-10


def test_integral_identity_trapezoid_order():
    rng = np.random.default_rng(6)
    F = random_contractive_generator(rng, 3, 2)
    X = cplx(rng, 3, 3)
    t = 1.0
    target = qds_evolve(F, X, t) - X
    errs = []
    for n in (20, 40, 80):
        s = np.linspace(0.0, t, n + 1)
        vals = np.array([lindblad_apply(F, qds_evolve(F, X, x)) for x in s])
        integral = (t / n) * (vals[1:-1].sum(axis=0) + 0.5 * (vals[0] + vals[-1]))
        errs.append(np.max(np.abs(integral - target)))
    slope = -np.polyfit(np.log([20, 40, 80]), np.log(errs), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.1)


def test_conservativity_examples():
    rng = np.random.default_rng(7)
    F = random_isometric_generator(rng, 4, 2)
    for t in (0.1, 1.0, 5.0):
        assert conservativity_defect(F, t)[0] <= 1e-10
    F = drift_only(-0.5 * np.eye(3), 1)
    for t in (0.3, 2.0):
        defect, profile = conservativity_defect(F, t)
        assert defect == pytest.approx(1 - np.exp(-t), abs=1e-14)
        assert np.allclose(profile, 1 - np.exp(-t), atol=1e-14)


def test_cayley_is_conservative_at_finite_truncation():
    # L(I) vanishes identically for the truncated Cayley model, so T_t(I) = I
    # up to rounding at every truncation; the mass loss of the untruncated
    # model is not visible here.
    F = models.cayley_shift(16)
    assert np.max(np.abs(lindblad_apply(F, np.eye(16)))) <= 1e-10
    defect, profile = conservativity_defect(F, 1.0)
    assert defect <= 1e-9
    assert np.max(np.abs(profile)) <= 1e-9


def test_iho_full_truncation_leaks_at_the_cut():
    F = models.iho(12, "sqrt", "zero")
    defect, profile = conservativity_defect(F, 1.0)
    assert defect > 0.1
    assert int(np.argmax(profile)) == 11
    assert conservativity_defect(F, 1.0, margin=6)[0] < defect


def test_cp_check_examples():
    rng = np.random.default_rng(8)
    F = random_contractive_generator(rng, 3, 2)
    assert cp_check(F, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert cp_check(GeneratorMatrix.zeros(3, 2), 2.0) == pytest.approx(0.0, abs=1e-15)
    C = choi_matrix(GeneratorMatrix.zeros(2, 1), 1.0)
    omega = np.eye(2).reshape(-1)
    assert np.allclose(C, np.outer(omega, omega))
    with pytest.raises(ValueError):
        cp_check(F, -1.0)
    with pytest.raises(ValueError):
        choi_matrix(GeneratorMatrix.zeros(qds.CHOI_MAX_DIM + 1, 0), 1.0)


def test_choi_paths_agree(monkeypatch):
    rng = np.random.default_rng(9)
    F = random_contractive_generator(rng, 3, 1)
    dense = choi_matrix(F, 0.7)
    monkeypatch.setattr(qds, "DENSE_MAX_DIM", 2)
    action = choi_matrix(F, 0.7)
    assert np.max(np.abs(dense - action)) <= 1e-12


def test_cp_on_small_zoo(small_zoo):
    for name, F in small_zoo.items():
        for t in (0.1, 1.0, 5.0):
            assert cp_check(F, t) >= -1e-10, (name, t)


def test_unitarity_report_examples():
    rng = np.random.default_rng(10)
    # a unitary exchange with a skew drift is isometric in both directions
    H = cplx(rng, 3, 3)
    H = H + H.conj().T
    S = np.linalg.qr(cplx(rng, 3, 3))[0]
    F = GeneratorMatrix.from_blocks([[1j * H, np.zeros((3, 3))], [np.zeros((3, 3)), S - np.eye(3)]])
    rep = unitarity_report(F, [0.1, 1.0, 5.0])
    assert rep.supports_unitarity(1e-10)
    assert json.loads(json.dumps(rep.to_json()))["t"] == [0.1, 1.0, 5.0]
    bd = models.birth_death(41, "const:1", "const:1")
    rep = unitarity_report(bd, [0.1, 0.5, 1.0], margin=14)
    assert max(rep.defect) <= 1e-8 and max(rep.dual_defect) <= 1e-8
    # at the full truncation the dual leaks through the window edges
    assert max(unitarity_report(bd, [1.0]).dual_defect) > 1e-3


def test_unitarity_report_empty_grid():
    rep = unitarity_report(GeneratorMatrix.zeros(2, 1), [])
    assert rep == UnitarityReport([], [], [])
    assert rep.supports_unitarity(0.0)


@settings(max_examples=25, deadline=None)
@given(seeds, st.floats(0, 3))
def test_adjoint_preservation(seed, t):
    rng = np.random.default_rng(seed)
    F = random_contractive_generator(rng, 3, 2)
    X = cplx(rng, 3, 3)
    assert np.max(np.abs(qds_evolve(F, X.conj().T, t) - qds_evolve(F, X, t).conj().T)) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(seeds, st.floats(0, 5), st.booleans())
def test_identity_is_not_increased(seed, t, isometric):
    rng = np.random.default_rng(seed)
    F = (random_isometric_generator if isometric else random_contractive_generator)(rng, 3, 2)
    assert max_form_deficit(F) <= 1e-10
    assert herm_max_eig(qds_evolve(F, np.eye(3), t) - np.eye(3)) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_lindblad_identity_is_deficit_corner(seed):
    rng = np.random.default_rng(seed)
    F = GeneratorMatrix(3, NoiseBasis(2), cplx(rng, 9, 9))
    assert np.max(np.abs(lindblad_apply(F, np.eye(3)) - deficit_operator(F)[:3, :3])) <= 1e-12


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_defect_nondecreasing_in_time(seed):
    rng = np.random.default_rng(seed)
    F = random_contractive_generator(rng, 3, 2)
    curve = [conservativity_defect(F, t)[0] for t in np.linspace(0, 3, 13)]
    assert all(b >= a - 1e-12 for a, b in zip(curve, curve[1:]))


def test_defect_nondecreasing_for_models(small_zoo):
    for name, F in small_zoo.items():
        curve = [conservativity_defect(F, t)[0] for t in np.linspace(0, 3, 13)]
        assert all(b >= a - 1e-12 for a, b in zip(curve, curve[1:])), name


def test_dual_of_isometric_generator_curve():
    rng = np.random.default_rng(11)
    F = random_isometric_generator(rng, 3, 1)
    rep = unitarity_report(F, [0.5, 2.0])
    assert max(rep.defect) <= 1e-10
    assert rep.dual_defect == [conservativity_defect(journe_dual(F), t)[0] for t in (0.5, 2.0)]
    assert op_norm(journe_dual(F).matrix) == pytest.approx(op_norm(F.matrix))
