"""Dense complex matrix primitives used throughout the package.

All routines take and return plain ``numpy`` arrays. Inputs are never
modified in place.
"""

import math

import numpy as np


class DimensionError(ValueError):
    """Raised when operands have incompatible or non-square shapes."""


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise DimensionError(f"expected a 2-d array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def _require_square(A: np.ndarray) -> None:
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")


# Pade coefficients and 1-norm thresholds from Higham (2005), "The scaling and
# squaring method for the matrix exponential revisited".
_PADE_B = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0, 960960.0,
         16380.0, 182.0, 1.0),
}
_THETA = {
    3: 1.495585217958292e-2,
    5: 2.539398330063230e-1,
    7: 9.504178996162932e-1,
    9: 2.097847961257068e0,
    13: 5.371920351148152e0,
}


def _pade_low(A: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    b = _PADE_B[order]
    ident = np.eye(A.shape[0], dtype=A.dtype)
    A2 = A @ A
    U = b[1] * ident
    V = b[0] * ident
    power = ident
    for k in range(1, order // 2 + 1):
        power = power @ A2
        U = U + b[2 * k + 1] * power
        V = V + b[2 * k] * power
    return A @ U, V


def _pade13(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    b = _PADE_B[13]
    ident = np.eye(A.shape[0], dtype=A.dtype)
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    return U, V


def expm(A) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a diagonal Pade approximant.

    The Pade degree and the number of squarings are chosen from the 1-norm
    of ``A`` as in Higham's algorithm.
    """
    A = as_matrix(A)
    _require_square(A)
    n = A.shape[0]
    if n == 0:
        return A.copy()
    norm1 = np.linalg.norm(A, 1)
    if norm1 == 0.0:
        return np.eye(n, dtype=complex)
    for order in (3, 5, 7, 9):
        if norm1 <= _THETA[order]:
            U, V = _pade_low(A, order)
            return np.linalg.solve(V - U, V + U)
    s = max(0, math.ceil(math.log2(norm1 / _THETA[13])))
    U, V = _pade13(A / 2.0**s)
    X = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        X = X @ X
    return X


def expm_action(apply, X: np.ndarray, t: float, norm_bound: float,
                tol: float = 1e-16, max_terms: int = 200) -> np.ndarray:
    """Return ``exp(t L) X`` for a linear map ``L`` given only by ``apply``.

    ``norm_bound`` must bound the operator norm of ``L``; the interval is cut
    into substeps of length at most ``1 / norm_bound`` and a Taylor series is
    summed on each until the next term drops below ``tol`` relative to the
    running sum. Suitable when materialising ``L`` is too expensive.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    X = np.array(X, dtype=complex)
    if t == 0 or norm_bound == 0:
        return X
    steps = max(1, math.ceil(t * norm_bound))
    h = t / steps
    for _ in range(steps):
        term = X
        total = X.copy()
        for k in range(1, max_terms + 1):
            term = apply(term) * (h / k)
            total = total + term
            scale = np.abs(total).max()
            if np.abs(term).max() <= tol * max(scale, 1e-300):
                break
        else:
            raise RuntimeError("Taylor series did not converge")
        X = total
    return X


def hermitian_part(A) -> np.ndarray:
    A = as_matrix(A)
    _require_square(A)
    return 0.5 * (A + A.conj().T)


def herm_max_eig(A) -> float:
    """Largest eigenvalue of the Hermitian part ``(A + A*)/2``."""
    H = hermitian_part(A)
    if H.shape[0] == 0:
        raise DimensionError("empty matrix has no eigenvalues")
    return float(np.linalg.eigvalsh(H)[-1])


def herm_min_eig(A) -> float:
    H = hermitian_part(A)
    if H.shape[0] == 0:
        raise DimensionError("empty matrix has no eigenvalues")
    return float(np.linalg.eigvalsh(H)[0])


def op_norm(A) -> float:
    """Operator 2-norm (largest singular value); 0 for empty matrices."""
    A = as_matrix(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def schur_product(A, B) -> np.ndarray:
    """Entrywise product; a 1x1 factor is broadcast as a scalar."""
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape == (1, 1) or B.shape == (1, 1) or A.shape == B.shape:
        return A * B
    raise DimensionError(f"shape mismatch {A.shape} vs {B.shape}")


def block_schur_product(S, blocks) -> np.ndarray:
    """Schur product of a scalar ``n x n`` matrix with an ``n x n`` operator matrix.

    ``blocks`` has shape ``(n, n, p, q)``; block ``(i, j)`` of the result is
    ``S[i, j] * blocks[i, j]``. Returns the assembled ``(n p) x (n q)`` matrix.
    """
    S = as_matrix(S)
    blocks = np.asarray(blocks, dtype=complex)
    if blocks.ndim != 4 or blocks.shape[:2] != S.shape:
        raise DimensionError(f"block array {blocks.shape} does not match {S.shape}")
    n, _, p, q = blocks.shape
    out = S[:, :, None, None] * blocks
    return out.transpose(0, 2, 1, 3).reshape(n * p, n * q)


def inv_sqrt_psd(A, what: str = "matrix") -> np.ndarray:
    """Inverse square root of a positive definite matrix."""
    H = hermitian_part(A)
    w, U = np.linalg.eigh(H)
    if w[0] <= 0:
        raise ValueError(f"{what} is not positive definite (min eigenvalue {w[0]:.3e})")
    return (U / np.sqrt(w)) @ U.conj().T
