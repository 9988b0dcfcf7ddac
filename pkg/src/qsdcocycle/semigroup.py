"""Associated semigroup families ``Q^{c,d}`` and Trotter-Kato studies."""

import csv
import threading
from dataclasses import dataclass, field

import numpy as np

from .generator import GeneratorMatrix, regularize
from .numerics import (DimensionError, as_matrix, expm, inv_sqrt_psd, op_norm)


def overlap_exponent(c, d) -> complex:
    """``<c, d> - |c|^2/2 - |d|^2/2``: log of the overlap rate of normalised
    exponential vectors of constant functions."""
    c = np.asarray(c, dtype=complex)
    d = np.asarray(d, dtype=complex)
    return (np.vdot(c, d) - 0.5 * np.vdot(c, c).real) - 0.5 * np.vdot(d, d).real


def generator_cd(F: GeneratorMatrix, c, d) -> np.ndarray:
    """Generator of ``Q^{c,d}``: ``sum_ab conj(c^_a) d^_b F^a_b + overlap_exponent(c, d) I``."""
    ch = F.basis.hat(c)
    dh = F.basis.hat(d)
    k = F.basis.augmented_dim
    acc = np.zeros((F.h_dim, F.h_dim), dtype=complex)
    for a in range(k):
        for b in range(k):
            coef = np.conj(ch[a]) * dh[b]
            if coef != 0:
                acc = acc + coef * F.block(a, b)
    return acc + overlap_exponent(ch[1:], dh[1:]) * np.eye(F.h_dim)


def evolve(G, t: float) -> np.ndarray:
    """``exp(t G)``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return expm(float(t) * as_matrix(G))


def _key(c, d) -> bytes:
    c = np.ascontiguousarray(c, dtype=complex)
    d = np.ascontiguousarray(d, dtype=complex)
    return c.tobytes() + b"|" + d.tobytes()


@dataclass(eq=False)
class SemigroupFamily:
    """The family ``{Q^{c,d}}`` attached to a generator, with a generator cache.

    Cache keys are the exact bit patterns of ``(c, d)``; readers never block,
    insertion is serialised.
    """

    source: GeneratorMatrix
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def h_dim(self) -> int:
        return self.source.h_dim

    @property
    def noise_dim(self) -> int:
        return self.source.noise_dim

    def generator(self, c, d) -> np.ndarray:
        key = _key(c, d)
        G = self._cache.get(key)
        if G is None:
            G = generator_cd(self.source, c, d)
            G.flags.writeable = False
            with self._lock:
                G = self._cache.setdefault(key, G)
        return G

    def evolve(self, c, d, t: float) -> np.ndarray:
        return evolve(self.generator(c, d), t)


def overlap_matrix(cs, t: float) -> np.ndarray:
    """``[<w(c_i 1_[0,t)), w(c_j 1_[0,t))>]``, exponentiated from log space."""
    n = len(cs)
    logs = np.array([[overlap_exponent(cs[i], cs[j]) for j in range(n)] for i in range(n)])
    return np.exp(t * logs)


def schur_criterion(fam: SemigroupFamily, A, B, Y, cs, t: float,
                    tol: float = 1e-10) -> tuple[bool, float]:
    """Check the Schur-product admissibility inequality for one sample.

    ``Y`` has shape ``(n, n, m)``: ``Y[i, j]`` is the column in ``h`` at
    position ``(i, j)``. It is rescaled so that ``|A^-1/2 Y B^-1/2| = 1``.
    Returns ``(holds, margin)`` where ``margin = 1 - |conclusion|``.
    """
    A = as_matrix(A)
    B = as_matrix(B)
    Y = np.asarray(Y, dtype=complex)
    n = A.shape[0]
    m = fam.h_dim
    if A.shape != (n, n) or B.shape != (n, n) or Y.shape != (n, n, m) or len(cs) != n:
        raise DimensionError("inconsistent Schur criterion operands")
    cs = [np.asarray(c, dtype=complex).reshape(-1) for c in cs]
    if any(c.shape[0] != fam.noise_dim for c in cs):
        raise DimensionError("noise vectors have the wrong length")
    Ih = np.eye(m)

    def assemble(blocks):  # (n, n, m) -> (n m) x n
        return blocks.transpose(0, 2, 1).reshape(n * m, n)

    Ai = inv_sqrt_psd(A, "A")
    Bi = inv_sqrt_psd(B, "B")
    hyp = op_norm(np.kron(Ai, Ih) @ assemble(Y) @ Bi)
    if hyp == 0:
        return True, 1.0
    Y = Y / hyp
    W = overlap_matrix(cs, t)
    QY = np.empty_like(Y)
    for i in range(n):
        for j in range(n):
            QY[i, j] = fam.evolve(cs[i], cs[j], t) @ Y[i, j]
    AWi = inv_sqrt_psd(A * W, "A . overlap")
    BWi = inv_sqrt_psd(B * W, "B . overlap")
    concl = op_norm(np.kron(AWi, Ih) @ assemble(QY) @ BWi)
    return concl <= 1.0 + tol, 1.0 - concl


def random_schur_trial(rng: np.random.Generator, fam: SemigroupFamily, n_max: int = 3,
                       t_max: float = 2.0, c_scale: float = 1.0):
    """Draw ``(A, B, Y, cs, t)`` for :func:`schur_criterion`."""
    n = int(rng.integers(1, n_max + 1))
    m, d = fam.h_dim, fam.noise_dim

    def cplx(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    def posdef():
        X = cplx(n, n)
        return X @ X.conj().T + 0.1 * np.eye(n)

    A, B = posdef(), posdef()
    Y = cplx(n, n, m)
    cs = [c_scale * cplx(d) for _ in range(n)]
    t = float(rng.uniform(0.0, t_max))
    return A, B, Y, cs, t


@dataclass
class TrotterStudy:
    schedule: list[int]
    tgrid: list[float]
    probes: list[np.ndarray]
    errors: dict[tuple[int, float], float]

    def sup_error(self, n: int) -> float:
        return max(self.errors[(n, t)] for t in self.tgrid)

    def rows(self):
        for n in self.schedule:
            for t in self.tgrid:
                yield n, t, self.errors[(n, t)]

    def write_csv(self, stream) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["n", "t", "error"])
        for n, t, err in self.rows():
            writer.writerow([n, f"{t:.17g}", f"{err:.17g}"])


def trotter_study(F: GeneratorMatrix, schedule, c, d, tgrid, probes,
                  tol: float = 1e-10) -> TrotterStudy:
    """Distance between ``Q^{c,d}_t`` of ``F`` and of its regularisations.

    The error at ``(n, t)`` is ``max_u |(Q^(n)_t - Q_t) u| / |u|`` over probes.
    """
    schedule = [int(n) for n in schedule]
    if not schedule or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be non-empty and strictly increasing")
    probes = [np.asarray(u, dtype=complex).reshape(-1) for u in probes]
    if not probes or any(np.linalg.norm(u) == 0 for u in probes):
        raise ValueError("probes must be non-zero vectors")
    if any(u.shape[0] != F.h_dim for u in probes):
        raise DimensionError("probe length does not match h_dim")
    tgrid = [float(t) for t in tgrid]
    U = np.stack(probes, axis=1)
    norms = np.linalg.norm(U, axis=0)
    G = generator_cd(F, c, d)
    exact = {t: evolve(G, t) @ U for t in tgrid}
    errors = {}
    for n in schedule:
        Gn = generator_cd(regularize(F, n, tol), c, d)
        for t in tgrid:
            diff = evolve(Gn, t) @ U - exact[t]
            errors[(n, t)] = float(np.max(np.linalg.norm(diff, axis=0) / norms))
    return TrotterStudy(schedule, tgrid, probes, errors)
