"""Stochastic generator matrices ``F = [F^a_b]`` on truncated ``h (x) k^``.

A generator with system dimension ``m`` and noise dimension ``d`` is held as
one dense ``m(d+1) x m(d+1)`` matrix whose ``(a, b)`` block of size ``m x m``
is ``F^a_b``. Index 0 is the time slot; ``1..d`` are the noise channels.

At finite ``d`` every matrix of operators is semiregular, so no check for it
is made here.
"""

from dataclasses import dataclass, field

import numpy as np

from .numerics import (DimensionError, as_matrix, herm_max_eig, op_norm)
from .truncation import Geometry, InteriorMask, interior_compress

DEFAULT_TOL = 1e-10
DEFAULT_A_GRID = (0.1, 1.0, 10.0)


class FormInequalityError(ValueError):
    """The generator violates ``F + F* + F* Delta F <= 0``."""


@dataclass(frozen=True)
class NoiseBasis:
    noise_dim: int

    def __post_init__(self):
        if self.noise_dim < 0:
            raise ValueError("noise_dim must be non-negative")

    @property
    def augmented_dim(self) -> int:
        return self.noise_dim + 1

    def hat(self, c) -> np.ndarray:
        """Augmented vector ``(1, c)``."""
        c = np.asarray(c, dtype=complex).reshape(-1)
        if c.shape[0] != self.noise_dim:
            raise DimensionError(f"noise vector has length {c.shape[0]}, expected {self.noise_dim}")
        return np.concatenate([[1.0 + 0j], c])


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    h_dim: int
    basis: NoiseBasis
    matrix: np.ndarray
    geometry: Geometry | None = field(default=None)

    def __post_init__(self):
        if self.h_dim <= 0:
            raise ValueError("h_dim must be positive")
        M = np.array(as_matrix(self.matrix), dtype=complex)
        n = self.h_dim * self.basis.augmented_dim
        if M.shape != (n, n):
            raise DimensionError(f"generator matrix has shape {M.shape}, expected ({n}, {n})")
        if self.geometry is not None and self.geometry.dim != self.h_dim:
            raise DimensionError("geometry does not match h_dim")
        M.flags.writeable = False
        object.__setattr__(self, "matrix", M)

    @classmethod
    def from_blocks(cls, blocks, geometry: Geometry | None = None) -> "GeneratorMatrix":
        """Build from a square nested sequence of ``m x m`` blocks, or a dict
        ``{(a, b): block}`` in which missing blocks are zero."""
        if isinstance(blocks, dict):
            if not blocks:
                raise ValueError("no blocks given")
            size = 1 + max(max(a, b) for a, b in blocks)
            m = as_matrix(next(iter(blocks.values()))).shape[0]
            zero = np.zeros((m, m), dtype=complex)
            blocks = [[blocks.get((a, b), zero) for b in range(size)] for a in range(size)]
        rows = [[as_matrix(B) for B in row] for row in blocks]
        size = len(rows)
        if size == 0 or any(len(r) != size for r in rows):
            raise DimensionError("block array must be square and non-empty")
        m = rows[0][0].shape[0]
        for a, row in enumerate(rows):
            for b, B in enumerate(row):
                if B.shape != (m, m):
                    raise DimensionError(f"block ({a},{b}) has shape {B.shape}, expected ({m}, {m})")
        return cls(m, NoiseBasis(size - 1), np.block(rows), geometry)

    @classmethod
    def zeros(cls, h_dim: int, noise_dim: int) -> "GeneratorMatrix":
        n = h_dim * (noise_dim + 1)
        return cls(h_dim, NoiseBasis(noise_dim), np.zeros((n, n), dtype=complex))

    @property
    def noise_dim(self) -> int:
        return self.basis.noise_dim

    @property
    def blocks(self) -> np.ndarray:
        """View of shape ``(d+1, d+1, m, m)``; ``blocks[a, b] = F^a_b``."""
        k, m = self.basis.augmented_dim, self.h_dim
        return self.matrix.reshape(k, m, k, m).transpose(0, 2, 1, 3)

    def block(self, a: int, b: int) -> np.ndarray:
        k = self.basis.augmented_dim
        if not (0 <= a < k and 0 <= b < k):
            raise IndexError(f"block index ({a},{b}) out of range for noise_dim {k - 1}")
        m = self.h_dim
        return self.matrix[a * m:(a + 1) * m, b * m:(b + 1) * m]

    def with_matrix(self, M) -> "GeneratorMatrix":
        return GeneratorMatrix(self.h_dim, self.basis, M, self.geometry)

    def interior_mask(self, margin: int) -> InteriorMask:
        geometry = self.geometry or Geometry("halfline", (self.h_dim,))
        return InteriorMask.for_geometry(geometry, margin)


def _delta(F: GeneratorMatrix) -> np.ndarray:
    """``Delta F``: ``F`` with the time-slot block row zeroed."""
    DF = np.array(F.matrix)
    DF[:F.h_dim, :] = 0
    return DF


def deficit_operator(F: GeneratorMatrix) -> np.ndarray:
    """``D(F) = F + F* + F* Delta F``, symmetrised to remove rounding skew."""
    M = F.matrix
    D = M + M.conj().T + M.conj().T @ _delta(F)
    return 0.5 * (D + D.conj().T)


def max_form_deficit(F: GeneratorMatrix) -> float:
    return herm_max_eig(deficit_operator(F))


def isometry_defect(F: GeneratorMatrix, mask: InteriorMask | None = None) -> float:
    D = deficit_operator(F)
    if mask is not None:
        D = interior_compress(D, mask, blocks=F.basis.augmented_dim)
    return op_norm(D)


def g_from_f(F: GeneratorMatrix, a: int, b: int) -> np.ndarray:
    """Generator of the associated semigroup ``Q^(a,b)`` (basis vectors ``d_a, d_b``)."""
    k = F.basis.augmented_dim
    if not (0 <= a < k and 0 <= b < k):
        raise IndexError(f"index ({a},{b}) out of range for noise_dim {k - 1}")
    ident = np.eye(F.h_dim)
    F00 = F.block(0, 0)
    # Scalars are spelled as overlap_exponent evaluates them so that
    # generator_cd agrees bit for bit at basis pairs.
    if a == 0 and b == 0:
        return np.array(F00)
    if b == 0:
        return F00 + F.block(a, 0) + ((0.0 - 0.5) - 0.0) * ident
    if a == 0:
        return F00 + F.block(0, b) + ((0.0 - 0.5) - 0.0) * ident
    delta = 1.0 if a == b else 0.0
    return F00 + F.block(0, b) + F.block(a, 0) + F.block(a, b) + ((delta - 0.5) - 0.5) * ident


def g_family(F: GeneratorMatrix) -> dict[tuple[int, int], np.ndarray]:
    k = F.basis.augmented_dim
    return {(a, b): g_from_f(F, a, b) for a in range(k) for b in range(k)}


def f_from_g(G: dict, geometry: Geometry | None = None) -> GeneratorMatrix:
    """Inverse of :func:`g_from_f` applied to a full family ``{(a, b): G^ab}``."""
    if (0, 0) not in G:
        raise KeyError("missing pair (0, 0)")
    size = 1 + max(max(a, b) for a, b in G)
    missing = [(a, b) for a in range(size) for b in range(size) if (a, b) not in G]
    if missing:
        raise KeyError(f"missing pairs {missing}")
    G = {key: as_matrix(val) for key, val in G.items()}
    m = G[(0, 0)].shape[0]
    for key, val in G.items():
        if val.shape != (m, m):
            raise DimensionError(f"G{key} has shape {val.shape}, expected ({m}, {m})")
    ident = np.eye(m)
    blocks = [[None] * size for _ in range(size)]
    blocks[0][0] = G[(0, 0)]
    for i in range(1, size):
        blocks[i][0] = G[(i, 0)] - G[(0, 0)] + 0.5 * ident
        blocks[0][i] = G[(0, i)] - G[(0, 0)] + 0.5 * ident
    for i in range(1, size):
        for j in range(1, size):
            delta = 1.0 if i == j else 0.0
            blocks[i][j] = G[(i, j)] - G[(i, 0)] - G[(0, j)] + G[(0, 0)] - delta * ident
    return GeneratorMatrix.from_blocks(blocks, geometry)


def journe_dual(F: GeneratorMatrix) -> GeneratorMatrix:
    """Adjoint block matrix: block ``(a, b)`` is ``(F^b_a)*``.

    With blocks laid out densely this is exactly the conjugate transpose.
    """
    return F.with_matrix(F.matrix.conj().T)


def regularize(F: GeneratorMatrix, n: int, tol: float = DEFAULT_TOL) -> GeneratorMatrix:
    """Bounded approximant ``(C_n (x) I)* F (C_n (x) I)`` with ``C_n = n (n - S)^-1``.

    ``S`` is the Hermitian part of ``F^0_0``. When the form inequality holds
    ``S <= 0``, so ``C_n`` is a positive contraction tending to ``I``, and the
    conjugation keeps the form inequality.
    """
    if n <= 0:
        raise ValueError("regularisation index must be positive")
    deficit = max_form_deficit(F)
    if deficit > tol:
        raise FormInequalityError(f"form inequality violated (max deficit {deficit:.3e})")
    m = F.h_dim
    S = 0.5 * (F.block(0, 0) + F.block(0, 0).conj().T)
    C = n * np.linalg.inv(n * np.eye(m) - S)
    C = 0.5 * (C + C.conj().T)
    Ct = np.kron(np.eye(F.basis.augmented_dim), C)
    return F.with_matrix(Ct.conj().T @ F.matrix @ Ct)


@dataclass
class DiagnosticsReport:
    """Numeric surrogates for the hypotheses of the construction theorem.

    ``relative_bound_profile`` maps a family label such as ``"F^0_1"`` to its
    basis norms and least relative bounds; a ``None`` in ``least_b`` means no
    finite bound exists over the tested vectors.
    """

    max_form_deficit: float
    isometry_defect: float
    g_dissipativity: dict[tuple[int, int], float]
    exchange_norm: float
    relative_bound_profile: dict[str, dict]
    verdicts: dict[str, bool]
    tol: float = DEFAULT_TOL
    margin: int | None = None

    def to_json(self) -> dict:
        return {
            "max_form_deficit": self.max_form_deficit,
            "isometry_defect": self.isometry_defect,
            "g_dissipativity": {f"{a},{b}": v for (a, b), v in sorted(self.g_dissipativity.items())},
            "exchange_norm": self.exchange_norm,
            "relative_bound_profile": self.relative_bound_profile,
            "verdicts": self.verdicts,
            "tol": self.tol,
            "margin": self.margin,
        }


def exchange_norm(F: GeneratorMatrix) -> float:
    """Norm of ``[F^i_j + delta_ij I]`` on ``h (x) k``; 0 when there is no noise."""
    m = F.h_dim
    if F.noise_dim == 0:
        return 0.0
    E = F.matrix[m:, m:] + np.eye(m * F.noise_dim)
    return op_norm(E)


def least_relative_bound(X: np.ndarray, A: np.ndarray, vectors: np.ndarray, a: float) -> float:
    """Least ``b`` with ``|X u| <= a |u| + b |A u|`` over the columns of ``vectors``.

    Returns ``inf`` when some vector has ``A u = 0`` but ``|X u| > a |u|``.
    """
    nu = np.linalg.norm(vectors, axis=0)
    nx = np.linalg.norm(X @ vectors, axis=0)
    na = np.linalg.norm(A @ vectors, axis=0)
    excess = nx - a * nu
    need = excess > 1e-14 * np.maximum(nu, 1.0)
    if not np.any(need):
        return 0.0
    if np.any(na[need] <= 1e-14 * nu[need]):
        return float("inf")
    return float(np.max(excess[need] / na[need]))


def relative_bound_profile(F: GeneratorMatrix, a_grid=DEFAULT_A_GRID, n_random: int = 1000,
                           seed: int = 0) -> dict[str, dict]:
    """Finite-dimensional surrogate for relative boundedness against ``F^0_0``.

    Tests the standard basis plus ``n_random`` seeded random unit vectors. This
    is a diagnostic only: a profile growing with truncation suggests the
    untruncated operator is not relatively bounded, but proves nothing.
    """
    m = F.h_dim
    rng = np.random.default_rng(seed)
    R = rng.standard_normal((m, n_random)) + 1j * rng.standard_normal((m, n_random))
    R /= np.linalg.norm(R, axis=0)
    vectors = np.concatenate([np.eye(m), R], axis=1)
    A = F.block(0, 0)
    profile = {}
    for i in range(1, F.noise_dim + 1):
        for label, X in ((f"F^0_{i}", F.block(0, i)), (f"F^{i}_0", F.block(i, 0))):
            bs = [least_relative_bound(X, A, vectors, a) for a in a_grid]
            profile[label] = {
                "basis_norms": [[float(x), float(y)] for x, y in
                                zip(np.linalg.norm(X, axis=0), np.linalg.norm(A, axis=0))],
                "a_grid": [float(a) for a in a_grid],
                "least_b": [None if np.isinf(b) else b for b in bs],
            }
    return profile


def diagnostics(F: GeneratorMatrix, tol: float = DEFAULT_TOL, margin: int | None = None,
                seed: int = 0, a_grid=DEFAULT_A_GRID, n_random: int = 1000) -> DiagnosticsReport:
    """Evaluate the necessary conditions and hypothesis surrogates for ``F``.

    ``margin`` switches the isometry defect to the interior compression for
    the generator's geometry.
    """
    mask = None if margin is None else F.interior_mask(margin)
    deficit = max_form_deficit(F)
    iso = isometry_defect(F, mask)
    gdiss = {key: herm_max_eig(G) for key, G in g_family(F).items()}
    exch = exchange_norm(F)
    profile = relative_bound_profile(F, a_grid, n_random, seed)
    d = F.noise_dim
    verdicts = {
        "form_inequality": deficit <= tol,
        "isometric": iso <= tol,
        "dissipative_generators": all(v <= tol for v in gdiss.values()),
        "exchange_contraction": exch <= 1.0 + tol,
        "relative_bound_finite": all(
            all(b is not None for b in profile[f"F^0_{i}"]["least_b"]) for i in range(1, d + 1)),
        "pregenerator_dissipative": all(gdiss[(0, i)] <= tol for i in range(1, d + 1)),
    }
    return DiagnosticsReport(deficit, iso, gdiss, exch, profile, verdicts, tol, margin)
