"""Cocycle matrix elements on exponential vectors of step functions.

Matrix elements are rebuilt from the associated semigroups by multiplying
``Q^{f(t_k), g(t_k)}`` over a partition containing every jump of ``f`` and
``g``, earliest interval leftmost. Times are kept as exact rationals so that
breakpoints from different step functions merge without rounding.
"""

from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .generator import GeneratorMatrix
from .numerics import DimensionError
from .semigroup import SemigroupFamily, overlap_exponent


def as_time(x) -> Fraction:
    """Exact rational time from a decimal string, int, float or Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        if not np.isfinite(x):
            raise ValueError("time must be finite")
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a time")


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Right-continuous step function ``R+ -> C^d`` supported on ``[0, T)``.

    ``segments[k] = (start_k, value_k)``; the value holds on
    ``[start_k, start_{k+1})`` and the last one on ``[start_last, T)``.
    """

    segments: tuple[tuple[Fraction, np.ndarray], ...]
    T: Fraction

    def __post_init__(self):
        segs = tuple((as_time(s), np.asarray(v, dtype=complex).reshape(-1))
                     for s, v in self.segments)
        T = as_time(self.T)
        if not segs:
            raise ValueError("step function needs at least one segment")
        if segs[0][0] != 0:
            raise ValueError("first segment must start at 0")
        if T <= 0:
            raise ValueError("support end must be positive")
        starts = [s for s, _ in segs]
        if any(b <= a for a, b in zip(starts, starts[1:])) or starts[-1] >= T:
            raise ValueError("segment starts must increase strictly and lie below T")
        if len({v.shape[0] for _, v in segs}) != 1:
            raise DimensionError("segment values have differing lengths")
        for _, v in segs:
            v.flags.writeable = False
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "T", T)

    @classmethod
    def constant(cls, value, T) -> "StepFunction":
        return cls(((Fraction(0), value),), T)

    @property
    def dim(self) -> int:
        return self.segments[0][1].shape[0]

    @property
    def starts(self) -> list[Fraction]:
        return [s for s, _ in self.segments]

    def __call__(self, s) -> np.ndarray:
        s = as_time(s)
        if s < 0 or s >= self.T:
            return np.zeros(self.dim, dtype=complex)
        value = self.segments[0][1]
        for start, v in self.segments:
            if start > s:
                break
            value = v
        return value


@dataclass(frozen=True, eq=False)
class MatrixElementQuery:
    """``<u (x) e(f 1_[0,t)), V_t v (x) e(g 1_[0,t))>``, normalised or not."""

    u: np.ndarray
    v: np.ndarray
    f: StepFunction
    g: StepFunction
    t: Fraction
    normalized: bool = True

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex).reshape(-1)
        v = np.asarray(self.v, dtype=complex).reshape(-1)
        t = as_time(self.t)
        if u.shape != v.shape:
            raise DimensionError("u and v have different lengths")
        if t < 0 or t > min(self.f.T, self.g.T):
            raise ValueError("t must lie in [0, min support end]")
        if self.f.dim != self.g.dim:
            raise DimensionError("f and g take values in different spaces")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "t", t)


def partition(f: StepFunction, g: StepFunction, t, splits: int = 1) -> list[tuple[Fraction, Fraction]]:
    """Intervals ``[a, b)`` covering ``[0, t)`` refining the jumps of ``f`` and ``g``.

    Each interval is further cut into ``splits`` equal parts. Zero-length
    intervals never appear.
    """
    t = as_time(t)
    if splits < 1:
        raise ValueError("splits must be at least 1")
    points = sorted({s for s in f.starts + g.starts if s < t} | {Fraction(0)})
    edges = [p for p in points if p < t] + [t]
    out = []
    for a, b in zip(edges, edges[1:]):
        step = (b - a) / splits
        out.extend((a + k * step, a + (k + 1) * step) for k in range(splits))
    return [(a, b) for a, b in out if b > a]


def _integral(f: StepFunction, g: StepFunction, t, integrand) -> complex:
    total = 0j
    for a, b in partition(f, g, t):
        total += float(b - a) * integrand(f(a), g(a))
    return total


def exp_overlap(f: StepFunction, g: StepFunction, t, normalized: bool = True) -> complex:
    """Inner product of (normalised) exponential vectors of ``f 1_[0,t)``, ``g 1_[0,t)``."""
    t = as_time(t)
    if t > min(f.T, g.T):
        raise ValueError("t exceeds the support of f or g")
    if normalized:
        return complex(np.exp(_integral(f, g, t, overlap_exponent)))
    return complex(np.exp(_integral(f, g, t, np.vdot)))


def _norm_factor(f: StepFunction, g: StepFunction, t) -> float:
    """``|e(f 1_[0,t))| |e(g 1_[0,t))|``."""
    log = _integral(f, g, t, lambda x, y: 0.5 * np.vdot(x, x).real + 0.5 * np.vdot(y, y).real)
    return float(np.exp(log.real))


def _reconstruct(fam: SemigroupFamily, q: MatrixElementQuery, splits: int) -> complex:
    if q.u.shape[0] != fam.h_dim:
        raise DimensionError("vector length does not match h_dim")
    if q.f.dim != fam.noise_dim:
        raise DimensionError("step function values do not match noise_dim")
    w = q.v
    for a, b in reversed(partition(q.f, q.g, q.t, splits)):
        w = fam.evolve(q.f(a), q.g(a), float(b - a)) @ w
    value = complex(np.vdot(q.u, w))
    if not q.normalized:
        value *= _norm_factor(q.f, q.g, q.t)
    return value


def reconstruct(fam: SemigroupFamily, q: MatrixElementQuery) -> complex:
    """Cocycle matrix element from the semigroup product over the merged partition."""
    return _reconstruct(fam, q, 1)


def refine_check(fam: SemigroupFamily, q: MatrixElementQuery, splits: int) -> float:
    """``|reconstruct(q) - reconstruct(q on a partition refined splits-fold)|``."""
    return abs(_reconstruct(fam, q, 1) - _reconstruct(fam, q, splits))


def qsde_residual(F: GeneratorMatrix, q: MatrixElementQuery, nt: int,
                  fam: SemigroupFamily | None = None) -> float:
    """Largest mismatch in the matrix-element form of the QSDE on a time grid.

    With ``f`` and ``g`` cut off at ``q.t`` and ``M(s) = <u e(f), V_s Y e(g)>``,
    checks ``M_v(s) - <u, v> e^{<f,g>} = int_0^s sum_ab conj f^a g^b M_{F^a_b v}``
    at every grid point, integrating by the composite trapezoid rule on a grid
    whose nodes include every breakpoint. The error is ``O(nt^-2)``.
    """
    if q.normalized:
        raise ValueError("the QSDE residual uses the unnormalised convention")
    if nt < 16:
        raise ValueError("nt must be at least 16")
    fam = fam or SemigroupFamily(F)
    t = q.t
    segments = partition(q.f, q.g, t)
    if not segments:
        return 0.0
    k = F.basis.augmented_dim

    def tail(s) -> complex:
        # int_s^t <f, g>
        return sum((float(b - max(a, s)) * np.vdot(q.f(a), q.g(a))
                    for a, b in segments if b > s), 0j)

    def element(vec, s) -> complex:
        return reconstruct(fam, replace(q, v=vec, t=s)) * np.exp(tail(s))

    lhs0 = np.vdot(q.u, q.v) * np.exp(tail(Fraction(0)))
    total = 0j
    worst = 0.0
    for a, b in segments:
        panels = max(1, round((nt - 1) * (b - a) / t))
        fh = F.basis.hat(q.f(a))
        gh = F.basis.hat(q.g(a))
        w = sum(np.conj(fh[al]) * gh[be] * (F.block(al, be) @ q.v)
                for al in range(k) for be in range(k))
        nodes = [a + (b - a) * Fraction(j, panels) for j in range(panels + 1)]
        vals = [element(w, s) for s in nodes]
        for j in range(panels):
            total += 0.5 * float(nodes[j + 1] - nodes[j]) * (vals[j] + vals[j + 1])
            lhs = element(q.v, nodes[j + 1]) - lhs0
            worst = max(worst, abs(lhs - total))
    return float(worst)
