"""Vector families, their frame operator and the spectral data derived from it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .linalg import EigenDecomp, jacobi_eigen


@dataclass(frozen=True)
class VectorFamily:
    """A finite family of vectors in R^dim, stored row-wise as a ``(p, dim)`` array."""

    dim: int
    vectors: np.ndarray

    def __post_init__(self):
        if int(self.dim) < 1:
            raise DomainError("dimension must be at least 1")
        v = np.array(self.vectors, dtype=float)
        if v.size == 0:
            v = v.reshape(0, int(self.dim))
        if v.ndim != 2 or v.shape[1] != int(self.dim):
            raise DomainError(f"every vector must have length {self.dim}, got array of shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "vectors", v)

    @classmethod
    def from_rows(cls, rows, dim: int | None = None) -> "VectorFamily":
        rows = [list(map(float, r)) for r in rows]
        if not rows:
            if dim is None:
                raise DomainError("dimension must be given explicitly for an empty family")
            return cls(dim, np.zeros((0, dim)))
        lengths = {len(r) for r in rows}
        if len(lengths) != 1:
            raise DomainError(f"vectors have mixed lengths {sorted(lengths)}")
        n = lengths.pop()
        if dim is not None and dim != n:
            raise DomainError(f"declared dimension {dim} does not match vector length {n}")
        return cls(n, np.array(rows))

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def union(self, other) -> "VectorFamily":
        other = np.asarray(other.vectors if isinstance(other, VectorFamily) else other, dtype=float)
        return VectorFamily(self.dim, np.vstack([self.vectors, other.reshape(-1, self.dim)]))


def frame_operator(f: VectorFamily) -> np.ndarray:
    """Sum of outer products ``f_i f_i^T``; the zero matrix for an empty family."""
    s = f.vectors.T @ f.vectors
    return 0.5 * (s + s.T)


@dataclass(frozen=True)
class FrameAnalysis:
    op: np.ndarray
    spectrum: EigenDecomp
    alpha: float  # trace of the frame operator
    h: float  # n * lambda_1 - alpha, the tightness deficit

    @property
    def n(self) -> int:
        return self.op.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.values

    @property
    def lambda_max(self) -> float:
        return float(self.spectrum.values[0])


def analyze(f: VectorFamily, tol: float = 1e-12) -> FrameAnalysis:
    op = frame_operator(f)
    op.setflags(write=False)
    spectrum = jacobi_eigen(op, tol=tol)
    alpha = float(np.sum(f.vectors * f.vectors))
    h = f.dim * float(spectrum.values[0]) - alpha
    return FrameAnalysis(op=op, spectrum=spectrum, alpha=alpha, h=max(h, 0.0))


def tightness_residual(f: VectorFamily, c: float) -> float:
    """Max-entry distance between the frame operator and ``c * I``."""
    return float(np.max(np.abs(frame_operator(f) - c * np.eye(f.dim))))
