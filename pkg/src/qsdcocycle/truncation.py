"""Interior compression of operators on truncated basis spaces.

Truncating an unbounded operator to the first ``m`` basis vectors corrupts a
band of indices near the cut. Identities that hold on finitely supported
vectors are therefore only checked on the "interior": basis indices at
distance at least ``margin`` from every truncation boundary.
"""

from dataclasses import dataclass

import numpy as np

from .numerics import DimensionError, as_matrix

GEOMETRY_KINDS = ("halfline", "window", "grid")


@dataclass(frozen=True)
class Geometry:
    """How the basis of the truncated system space is laid out.

    * ``halfline``: ``l2(Z+)`` cut at the top, ``shape = (m,)``.
    * ``window``: ``l2(Z)`` restricted to a symmetric window, cut at both ends.
    * ``grid``: ``l2(Z+ x Z+)`` with row-major index ``i * shape[1] + j``,
      cut at the top of each axis.
    """

    kind: str
    shape: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in GEOMETRY_KINDS:
            raise ValueError(f"unknown geometry kind {self.kind!r}")
        if any(int(s) <= 0 for s in self.shape):
            raise ValueError("geometry shape must be positive")
        if self.kind == "grid" and len(self.shape) != 2:
            raise ValueError("grid geometry needs two axis sizes")
        if self.kind != "grid" and len(self.shape) != 1:
            raise ValueError(f"{self.kind} geometry needs one axis size")

    @property
    def dim(self) -> int:
        return int(np.prod(self.shape))

    def to_json(self) -> dict:
        return {"kind": self.kind, "shape": list(self.shape)}

    @classmethod
    def from_json(cls, obj: dict) -> "Geometry":
        return cls(str(obj["kind"]), tuple(int(s) for s in obj["shape"]))


@dataclass(frozen=True)
class InteriorMask:
    dim: int
    margin: int
    kept: tuple[int, ...]

    def __post_init__(self):
        if self.margin < 0:
            raise ValueError("margin must be non-negative")
        if not self.kept:
            raise ValueError("interior mask keeps no indices")
        if min(self.kept) < 0 or max(self.kept) >= self.dim:
            raise DimensionError("mask index out of range")

    @classmethod
    def for_geometry(cls, geometry: Geometry, margin: int) -> "InteriorMask":
        if margin < 0:
            raise ValueError("margin must be non-negative")
        if geometry.kind == "halfline":
            (m,) = geometry.shape
            kept = range(0, m - margin)
        elif geometry.kind == "window":
            (m,) = geometry.shape
            kept = range(margin, m - margin)
        else:
            m1, m2 = geometry.shape
            kept = [i * m2 + j for i in range(m1 - margin) for j in range(m2 - margin)]
        return cls(geometry.dim, margin, tuple(kept))


def interior_compress(A, mask: InteriorMask, blocks: int = 1) -> np.ndarray:
    """Principal submatrix of ``A`` on the kept indices.

    ``A`` may be a ``(blocks*dim) x (blocks*dim)`` block matrix, in which case
    the same mask is applied inside every block.
    """
    A = as_matrix(A)
    if A.shape != (blocks * mask.dim, blocks * mask.dim):
        raise DimensionError(
            f"matrix of shape {A.shape} does not match mask dim {mask.dim} x {blocks} blocks")
    kept = np.asarray(mask.kept)
    idx = np.concatenate([b * mask.dim + kept for b in range(blocks)])
    return A[np.ix_(idx, idx)]
