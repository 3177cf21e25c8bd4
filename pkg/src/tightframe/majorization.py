"""Majorization between non-increasing nonnegative sequences.

Sequences of different lengths are compared with implicit zero padding: prefix
sums are checked up to the shorter length and the totals must agree.  An
infinite summable sequence is represented by a finite head plus its exact
total (``SortedSeq.total``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class SortedSeq:
    values: np.ndarray
    total: float | None = None  # analytic total when ``values`` is a truncation
    prefix_sums: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size and (np.any(v < 0) or np.any(np.diff(v) > 0)):
            raise DomainError("SortedSeq needs non-increasing nonnegative values")
        v.setflags(write=False)
        ps = np.cumsum(v)
        ps.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "prefix_sums", ps)

    @classmethod
    def from_unsorted(cls, values, total: float | None = None) -> "SortedSeq":
        return cls(-np.sort(-np.asarray(values, dtype=float).reshape(-1)), total)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def sum(self) -> float:
        if self.total is not None:
            return float(self.total)
        return float(self.prefix_sums[-1]) if len(self) else 0.0

    def padded(self, extra: int) -> "SortedSeq":
        return SortedSeq(np.concatenate([self.values, np.zeros(extra)]), self.total)


def majorizes(b: SortedSeq, a: SortedSeq, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``b`` majorizes ``a`` up to a relative tolerance of scale ``1 + sum(a)``."""
    scale = tol * (1.0 + abs(a.sum))
    t = min(len(a), len(b))
    if t and np.any(b.prefix_sums[:t] < a.prefix_sums[:t] - scale):
        return False
    return abs(b.sum - a.sum) <= scale


def zero_tail_check(b: SortedSeq, a: SortedSeq, tol: float = DEFAULT_TOL) -> bool:
    """When ``b`` majorizes a shorter ``a``, the entries of ``b`` past ``len(a)`` vanish."""
    tail = b.values[len(a):]
    return bool(np.all(tail <= tol * (1.0 + abs(a.sum))))
