"""Vacuum-expectation quantum dynamical semigroup of a generator.

The form-generator acts on ``B(h)`` as

    L(X) = X F^0_0 + (F^0_0)* X + sum_i (F^i_0)* X F^i_0

and ``T_t = exp(t L)``. In finite dimensions the master equation has a unique
solution, so no minimality selection is needed. Superoperators use
column-stacking vectorisation: ``vec(A X B) = (B^T kron A) vec(X)``.
"""

import threading
import weakref
from dataclasses import dataclass, field

import numpy as np

from .generator import GeneratorMatrix, journe_dual
from .numerics import DimensionError, as_matrix, expm, expm_action, op_norm
from .truncation import interior_compress

# Above this system dimension T_t is applied without forming the m^2 x m^2
# superoperator.
DENSE_MAX_DIM = 32
CHOI_MAX_DIM = 64


def vec(X: np.ndarray) -> np.ndarray:
    return np.asarray(X).reshape(-1, order="F")


def unvec(x: np.ndarray, m: int) -> np.ndarray:
    return np.asarray(x).reshape((m, m), order="F")


def _jumps(F: GeneratorMatrix) -> list[np.ndarray]:
    return [F.block(i, 0) for i in range(1, F.noise_dim + 1)]


def lindblad_apply(F: GeneratorMatrix, X) -> np.ndarray:
    """``L(X)``; also accepts a stack of matrices with shape ``(..., m, m)``."""
    X = np.asarray(X, dtype=complex)
    m = F.h_dim
    if X.shape[-2:] != (m, m):
        raise DimensionError(f"X has shape {X.shape}, expected (..., {m}, {m})")
    F00 = F.block(0, 0)
    out = X @ F00 + F00.conj().T @ X
    for J in _jumps(F):
        out = out + J.conj().T @ X @ J
    return out


def lindblad_norm_bound(F: GeneratorMatrix) -> float:
    return 2.0 * op_norm(F.block(0, 0)) + sum(op_norm(J) ** 2 for J in _jumps(F))


@dataclass(eq=False)
class QDSSuperoperator:
    source: GeneratorMatrix
    matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        F = self.source
        m = F.h_dim
        ident = np.eye(m)
        F00 = F.block(0, 0)
        S = np.kron(F00.T, ident) + np.kron(ident, F00.conj().T)
        for J in _jumps(F):
            S = S + np.kron(J.T, J.conj().T)
        S.flags.writeable = False
        self.matrix = S

    @property
    def h_dim(self) -> int:
        return self.source.h_dim

    def apply(self, X) -> np.ndarray:
        return unvec(self.matrix @ vec(as_matrix(X)), self.h_dim)

    def propagator(self, t: float) -> np.ndarray:
        return expm(float(t) * self.matrix)


_superops: "weakref.WeakKeyDictionary[GeneratorMatrix, QDSSuperoperator]" = weakref.WeakKeyDictionary()
_superops_lock = threading.Lock()


def superoperator(F: GeneratorMatrix) -> QDSSuperoperator:
    """Cached superoperator of ``F`` (built once per generator object)."""
    S = _superops.get(F)
    if S is None:
        S = QDSSuperoperator(F)
        with _superops_lock:
            S = _superops.setdefault(F, S)
    return S


def qds_evolve(F: GeneratorMatrix, X, t: float, method: str = "auto") -> np.ndarray:
    """``T_t(X)``.

    ``method`` is ``"dense"`` (exponential of the superoperator), ``"action"``
    (Taylor action on ``m x m`` matrices) or ``"auto"``, which picks dense up
    to ``DENSE_MAX_DIM``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    X = as_matrix(X)
    m = F.h_dim
    if X.shape != (m, m):
        raise DimensionError(f"X has shape {X.shape}, expected ({m}, {m})")
    if method == "auto":
        method = "dense" if m <= DENSE_MAX_DIM else "action"
    if method == "dense":
        return unvec(superoperator(F).propagator(t) @ vec(X), m)
    if method == "action":
        return expm_action(lambda Y: lindblad_apply(F, Y), X, float(t), lindblad_norm_bound(F))
    raise ValueError(f"unknown method {method!r}")


def conservativity_defect(F: GeneratorMatrix, t: float, method: str = "auto",
                          margin: int | None = None) -> tuple[float, np.ndarray]:
    """``(|T_t(I) - I|, diag(I - T_t(I)))``.

    Since ``<u, T_t(I) u> = |V_t (u (x) vacuum)|^2``, the diagonal entry at
    ``k`` is the isometry defect of the cocycle on ``e_k (x) vacuum``. With
    ``margin`` the norm is taken on the interior compression only.
    """
    ident = np.eye(F.h_dim)
    diff = qds_evolve(F, ident, t, method) - ident
    profile = -np.real(np.diag(diff))
    if margin is not None:
        diff = interior_compress(diff, F.interior_mask(margin))
    return op_norm(diff), profile


def choi_matrix(F: GeneratorMatrix, t: float) -> np.ndarray:
    """``sum_ij E_ij kron T_t(E_ij)``."""
    m = F.h_dim
    if m > CHOI_MAX_DIM:
        raise ValueError(f"Choi matrix needs h_dim <= {CHOI_MAX_DIM}, got {m}")
    if m <= DENSE_MAX_DIM:
        P4 = superoperator(F).propagator(t).reshape((m, m, m, m), order="F")
        # P4[k, l, i, j] = T_t(E_ij)[k, l]
        C = P4.transpose(2, 0, 3, 1)
    else:
        units = np.zeros((m, m, m, m), dtype=complex)
        idx = np.arange(m)
        units[idx[:, None], idx[None, :], idx[:, None], idx[None, :]] = 1.0
        images = expm_action(lambda Y: lindblad_apply(F, Y), units.reshape(m * m, m, m),
                             float(t), lindblad_norm_bound(F)).reshape(m, m, m, m)
        C = images.transpose(0, 2, 1, 3)
    return C.reshape(m * m, m * m)


def cp_check(F: GeneratorMatrix, t: float) -> float:
    """Smallest eigenvalue of the Choi matrix of ``T_t``; non-negative iff CP."""
    if t < 0:
        raise ValueError("t must be non-negative")
    C = choi_matrix(F, t)
    return float(np.linalg.eigvalsh(0.5 * (C + C.conj().T))[0])


@dataclass
class UnitarityReport:
    tgrid: list[float]
    defect: list[float]
    dual_defect: list[float]

    def supports_unitarity(self, tol: float) -> bool:
        return max(self.defect + self.dual_defect, default=0.0) <= tol

    def to_json(self) -> dict:
        return {"t": self.tgrid, "defect": self.defect, "dual_defect": self.dual_defect}


def unitarity_report(F: GeneratorMatrix, tgrid, method: str = "auto",
                     margin: int | None = None) -> UnitarityReport:
    """Conservativity-defect curves of ``F`` and of its adjoint block matrix.

    Both near zero supports unitarity at this truncation without proving it.
    """
    tgrid = [float(t) for t in tgrid]
    dual = journe_dual(F)
    return UnitarityReport(
        tgrid,
        [conservativity_defect(F, t, method, margin)[0] for t in tgrid],
        [conservativity_defect(dual, t, method, margin)[0] for t in tgrid],
    )
