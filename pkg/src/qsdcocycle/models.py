"""Example generators on truncated sequence spaces.

* :func:`cayley_shift` - half-line shift through its Cayley transform (``d = 1``).
* :func:`iho` - inverse harmonic oscillator type generator (``d = 1``).
* :func:`birth_death` - two-channel birth and death process on ``Z`` (``d = 2``).
* :func:`shg` - two coupled oscillators for second harmonic generation (``d = 2``).

Shifts and ladder operators are compressed to the truncation (entries
leaving the window are dropped), so identities valid on finitely supported
vectors only hold away from the cut; see :mod:`qsdcocycle.truncation`.
Documented interior margins: 2 for the one-step models, 3 for ``shg``.
"""

from dataclasses import dataclass

import numpy as np

from .generator import GeneratorMatrix, deficit_operator
from .numerics import DimensionError
from .truncation import Geometry, InteriorMask, interior_compress  # noqa: F401

MODEL_MARGINS = {"cayley": 2, "iho": 2, "bd": 2, "shg": 3}


@dataclass(frozen=True, eq=False)
class CoefficientFunction:
    """A function on integer indices, either a named preset or a table.

    Presets: ``zero``, ``sqrt`` (``sqrt(max(n, 0))``), ``abs-sqrt``
    (``sqrt(|n|)``), ``odd-sqrt`` (``sqrt(n)`` on odd ``n``, else 0),
    ``const:x`` and ``linear:a,b`` (``a n + b``). Tables hold ``values[k]``
    for index ``offset + k``.
    """

    kind: str
    params: tuple = ()
    values: tuple = ()
    offset: int = 0

    @classmethod
    def parse(cls, spec: str) -> "CoefficientFunction":
        spec = spec.strip()
        name, _, arg = spec.partition(":")
        if name in ("zero", "sqrt", "abs-sqrt", "odd-sqrt") and not arg:
            return cls(name)
        if name == "const" and arg:
            return cls("const", (complex(arg),))
        if name == "linear" and arg:
            a, b = arg.split(",")
            return cls("linear", (complex(a), complex(b)))
        raise ValueError(f"unknown coefficient function {spec!r}")

    @classmethod
    def table(cls, values, offset: int = 0) -> "CoefficientFunction":
        return cls("table", (), tuple(complex(v) for v in values), int(offset))

    def __call__(self, n: int) -> complex:
        n = int(n)
        kind = self.kind
        if kind == "zero":
            return 0j
        if kind == "sqrt":
            return complex(np.sqrt(max(n, 0)))
        if kind == "abs-sqrt":
            return complex(np.sqrt(abs(n)))
        if kind == "odd-sqrt":
            return complex(np.sqrt(n)) if n > 0 and n % 2 == 1 else 0j
        if kind == "const":
            return self.params[0]
        if kind == "linear":
            a, b = self.params
            return a * n + b
        if kind == "table":
            k = n - self.offset
            if not 0 <= k < len(self.values):
                raise IndexError(f"coefficient table has no entry for index {n}")
            return self.values[k]
        raise ValueError(f"unknown coefficient kind {kind!r}")

    def diag(self, indices) -> np.ndarray:
        return np.diag(np.array([self(n) for n in indices], dtype=complex))

    def __str__(self) -> str:
        if self.kind in ("const", "linear"):
            return f"{self.kind}:" + ",".join(f"{p}" for p in self.params)
        return self.kind


def _as_coefficient(x) -> CoefficientFunction:
    return x if isinstance(x, CoefficientFunction) else CoefficientFunction.parse(x)


def right_shift(m: int) -> np.ndarray:
    """Compressed right shift ``e_n -> e_{n+1}`` (last basis vector is dropped)."""
    return np.diag(np.ones(m - 1), -1).astype(complex)


def annihilator(m: int) -> np.ndarray:
    """Truncated ``a e_n = sqrt(n) e_{n-1}``."""
    return np.diag(np.sqrt(np.arange(1, m)), 1).astype(complex)


def cayley_shift(m: int) -> GeneratorMatrix:
    """``[[-L*L/2, -L*], [L, 0]]`` with ``L = i (I + W)(I - W)^-1``."""
    if m < 3:
        raise ValueError("cayley_shift needs m >= 3")
    W = right_shift(m)
    ident = np.eye(m)
    # I - W is unit lower triangular, so this inverse is exact: I + W + W^2 + ...
    L = 1j * (ident + W) @ np.linalg.inv(ident - W)
    Ls = L.conj().T
    return GeneratorMatrix.from_blocks(
        [[-0.5 * (Ls @ L), -Ls], [L, np.zeros((m, m))]], Geometry("halfline", (m,)))


def iho(m: int, lam="sqrt", mu="zero") -> GeneratorMatrix:
    """``[[-|lam|^2(N+1)/2 + i mu(N), W* conj(lam)(N)], [-lam(N) W, 0]]``."""
    if m < 2:
        raise ValueError("iho needs m >= 2")
    lam = _as_coefficient(lam)
    mu = _as_coefficient(mu)
    n = range(m)
    mu_vals = np.array([mu(k) for k in n])
    if np.any(mu_vals.imag != 0):
        raise ValueError("mu must be real-valued")
    W = right_shift(m)
    lam_next = np.array([abs(lam(k + 1)) ** 2 for k in n])
    F00 = np.diag(-0.5 * lam_next + 1j * mu_vals.real)
    lamN = lam.diag(n)
    return GeneratorMatrix.from_blocks(
        [[F00, W.conj().T @ lamN.conj()], [-lamN @ W, np.zeros((m, m))]],
        Geometry("halfline", (m,)))


def birth_death(m_window: int, lam="const:1", mu="zero") -> GeneratorMatrix:
    """Birth and death generator on the window ``-M..M`` of ``Z``, ``m_window = 2M + 1``."""
    if m_window < 3 or m_window % 2 == 0:
        raise ValueError("birth_death needs an odd window of size >= 3")
    lam = _as_coefficient(lam)
    mu = _as_coefficient(mu)
    M = (m_window - 1) // 2
    n = range(-M, M + 1)
    m = m_window
    W = right_shift(m)
    Ws = W.conj().T
    ident = np.eye(m)
    lamN, muN = lam.diag(n), mu.diag(n)
    F00 = -0.5 * (lamN.conj() @ lamN) - 0.5 * (muN.conj() @ muN)
    zero = np.zeros((m, m))
    return GeneratorMatrix.from_blocks(
        [[F00, lamN.conj() @ Ws, muN.conj() @ W],
         [-lamN, Ws - ident, zero],
         [-muN, zero, W - ident]],
        Geometry("window", (m,)))


def permutation_matrix(perm, dim: int) -> np.ndarray:
    """Unitary ``V e_k = e_{perm[k]}``."""
    perm = [int(p) for p in perm]
    if len(perm) != dim or sorted(perm) != list(range(dim)):
        raise ValueError(f"not a permutation of range({dim})")
    V = np.zeros((dim, dim), dtype=complex)
    V[perm, range(dim)] = 1.0
    return V


def shg_hamiltonian_part(m1: int, m2: int, omega: float, lam: float, k_sign: str = "dissipative"):
    """``(K, a1, a2)`` on ``l2(Z+^2)`` truncated to ``m1 x m2`` (index ``i*m2 + j``).

    ``K = s (a1* a1 + a2* a2)/2 + omega (a1* - a1) + lam (a1*^2 a2 - a1^2 a2*)``
    with ``s = -1`` for ``k_sign="dissipative"`` and ``s = +1`` for
    ``"verbatim"``. Only ``s = -1`` gives a dissipative ``K`` and the
    isometric equality for the full generator.
    """
    signs = {"dissipative": -1.0, "verbatim": 1.0}
    if k_sign not in signs:
        raise ValueError(f"k_sign must be one of {sorted(signs)}")
    a1 = np.kron(annihilator(m1), np.eye(m2))
    a2 = np.kron(np.eye(m1), annihilator(m2))
    a1s, a2s = a1.conj().T, a2.conj().T
    K = (signs[k_sign] * 0.5 * (a1s @ a1 + a2s @ a2) + omega * (a1s - a1)
         + lam * (a1s @ a1s @ a2 - a1 @ a1 @ a2s))
    return K, a1, a2


def shg(m1: int, m2: int, omega: float = 1.0, lam: float = 0.5, perm1=None, perm2=None,
        k_sign: str = "dissipative") -> GeneratorMatrix:
    """``[[K, -a1* V1, -a2* V2], [a1, V1 - I, 0], [a2, 0, V2 - I]]``.

    ``perm1``/``perm2`` give basis permutations ``V1``/``V2`` of the product
    index set; omitted ones are the identity, which yields the unperturbed
    generator ``[[K, -a1*, -a2*], [a1, 0, 0], [a2, 0, 0]]``.
    """
    if m1 < 3 or m2 < 3:
        raise ValueError("shg needs m1, m2 >= 3")
    omega, lam = float(omega), float(lam)
    m = m1 * m2
    K, a1, a2 = shg_hamiltonian_part(m1, m2, omega, lam, k_sign)
    ident = np.eye(m)
    V1 = ident if perm1 is None else permutation_matrix(perm1, m)
    V2 = ident if perm2 is None else permutation_matrix(perm2, m)
    zero = np.zeros((m, m))
    return GeneratorMatrix.from_blocks(
        [[K, -(a1.conj().T @ V1), -(a2.conj().T @ V2)],
         [a1, V1 - ident, zero],
         [a2, zero, V2 - ident]],
        Geometry("grid", (m1, m2)))


def growth_check(lam, c: float, indices) -> bool:
    """Whether ``c |lam(n)| <= |lam(n+1)|`` for every ``n`` in ``indices``."""
    if c <= 0:
        raise ValueError("c must be positive")
    lam = _as_coefficient(lam)
    return all(c * abs(lam(n)) <= abs(lam(n + 1)) for n in indices)


def build(name: str, dim: int, dim2: int | None = None, lam=None, mu=None, omega: float = 1.0,
          coupling: float = 0.5, perm1=None, perm2=None, k_sign: str = "dissipative") -> GeneratorMatrix:
    """Dispatch by model name (``cayley``, ``iho``, ``bd``, ``shg``)."""
    if name == "cayley":
        return cayley_shift(dim)
    if name == "iho":
        return iho(dim, lam or "sqrt", mu or "zero")
    if name == "bd":
        return birth_death(dim, lam or "const:1", mu or "zero")
    if name == "shg":
        return shg(dim, dim2 or dim, omega, coupling, perm1, perm2, k_sign)
    raise ValueError(f"unknown model {name!r}")


def interior_deficit(F: GeneratorMatrix, margin: int) -> np.ndarray:
    """Interior compression of the deficit operator for the model's geometry."""
    mask = F.interior_mask(margin)
    if mask.dim != F.h_dim:
        raise DimensionError("mask does not match generator")
    return interior_compress(deficit_operator(F), mask, blocks=F.basis.augmented_dim)
