"""Feasibility and minimal size of tight completions with prescribed norms.

Given a family with frame operator eigenvalues ``lam[0] >= ... >= lam[n-1]``
and trace ``alpha``, adding ``r`` vectors with squared norms ``a_1..a_r`` can
produce a tight frame only with constant ``(A_r + alpha) / n`` where ``A_r`` is
the r-th partial sum of the norm sequence.  The decision reduces to comparing
that constant with the running maxima

    c_0 = lam[0],   c_k = max(c_{k-1}, (A_k + L_k) / k),

``L_k`` being the sum of the k smallest eigenvalues.

Comparisons use a relative tolerance: ``x >= y`` is accepted when
``x >= y - tol * (1 + |x|)``, with ``x`` always the candidate tight constant.
Because the slack only depends on ``x``, checking every inequality separately
and checking against their maximum give identical answers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BudgetError, DomainError
from .frames import FrameAnalysis

DEFAULT_TOL = 1e-9
INFINITE = math.inf
# Largest r the galloping search will consider.
MAX_COUNT = 1 << 62


# ---------------------------------------------------------------------------
# Norm sequences
# ---------------------------------------------------------------------------


class NormSpec:
    """A non-increasing sequence of positive squared norms ``a_1, a_2, ...``.

    Indices are 1-based in ``prefix_sum`` to match the usual notation; ``head``
    returns a 0-based numpy array.
    """

    kind = "abstract"

    @property
    def length(self) -> int | None:
        return None

    @property
    def total_sum(self) -> float:
        raise NotImplementedError

    def prefix_sum(self, k: int) -> float:
        raise NotImplementedError

    def head(self, k: int) -> np.ndarray:
        raise NotImplementedError

    @property
    def first(self) -> float:
        return float(self.head(1)[0])

    @property
    def summable(self) -> bool:
        return math.isfinite(self.total_sum)

    def available(self, k: int) -> int:
        """Number of terms among the first ``k`` that actually exist."""
        return k if self.length is None else min(k, self.length)

    def _check(self, k: int):
        if k < 0:
            raise DomainError("negative term count")
        if self.length is not None and k > self.length:
            raise BudgetError(f"norm list has {self.length} terms, {k} requested")

    def scaled(self, t: float) -> "NormSpec":
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class FiniteList(NormSpec):
    values: tuple

    kind = "finite"

    def __post_init__(self):
        v = tuple(float(x) for x in self.values)
        if not v:
            raise DomainError("finite norm list is empty")
        if any(x <= 0 for x in v) or any(v[i] < v[i + 1] for i in range(len(v) - 1)):
            raise DomainError("norm list must be positive and non-increasing")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_prefix", np.concatenate([[0.0], np.cumsum(v)]))

    @property
    def length(self) -> int:
        return len(self.values)

    @property
    def total_sum(self) -> float:
        return float(self._prefix[-1])

    def prefix_sum(self, k: int) -> float:
        self._check(k)
        return float(self._prefix[k])

    def head(self, k: int) -> np.ndarray:
        self._check(k)
        return np.array(self.values[:k])

    def scaled(self, t: float) -> "FiniteList":
        return FiniteList(tuple(t * x for x in self.values))

    def to_dict(self) -> dict:
        return {"kind": "finite", "values": list(self.values)}


@dataclass(frozen=True)
class Constant(NormSpec):
    value: float = 1.0

    kind = "constant"

    def __post_init__(self):
        if not float(self.value) > 0:
            raise DomainError("constant norm must be positive")
        object.__setattr__(self, "value", float(self.value))

    @property
    def total_sum(self) -> float:
        return math.inf

    def prefix_sum(self, k: int) -> float:
        self._check(k)
        return k * self.value

    def head(self, k: int) -> np.ndarray:
        self._check(k)
        return np.full(k, self.value)

    def scaled(self, t: float) -> "Constant":
        return Constant(t * self.value)

    def to_dict(self) -> dict:
        return {"kind": "constant", "value": self.value}


@dataclass(frozen=True)
class Geometric(NormSpec):
    start: float
    ratio: float

    kind = "geometric"

    def __post_init__(self):
        if not float(self.start) > 0:
            raise DomainError("geometric first term must be positive")
        if not 0.0 < float(self.ratio) < 1.0:
            raise DomainError("geometric ratio must lie in (0, 1)")
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "ratio", float(self.ratio))

    @property
    def first(self) -> float:
        return self.start

    @property
    def total_sum(self) -> float:
        return self.start / (1.0 - self.ratio)

    def prefix_sum(self, k: int) -> float:
        self._check(k)
        # start * (1 - ratio**k) / (1 - ratio), stable for ratio near 1
        return self.start * -math.expm1(k * math.log(self.ratio)) / (1.0 - self.ratio)

    def head(self, k: int) -> np.ndarray:
        self._check(k)
        return self.start * self.ratio ** np.arange(k, dtype=float)

    def scaled(self, t: float) -> "Geometric":
        return Geometric(t * self.start, self.ratio)

    def to_dict(self) -> dict:
        return {"kind": "geometric", "first": self.start, "ratio": self.ratio}


def norm_spec_from_dict(d: dict) -> NormSpec:
    kind = str(d.get("kind", "")).lower()
    if kind in ("finite", "finitelist", "list"):
        return FiniteList(tuple(d["values"]))
    if kind == "constant":
        return Constant(d.get("value", 1.0))
    if kind == "geometric":
        return Geometric(d["first"], d["ratio"])
    raise DomainError(f"unknown norm kind {d.get('kind')!r}")


# ---------------------------------------------------------------------------
# Tolerant comparisons
# ---------------------------------------------------------------------------


def _geq(x: float, y: float, tol: float) -> bool:
    return x >= y - tol * (1.0 + abs(x))


def _close(x: float, y: float, tol: float) -> bool:
    return abs(x - y) <= tol * (1.0 + abs(x))


def tight_constant(an: FrameAnalysis, a: NormSpec, r: int) -> float:
    """The only possible tight bound after adding ``r`` vectors."""
    return (a.prefix_sum(r) + an.alpha) / an.n


def _smallest_sums(an: FrameAnalysis) -> np.ndarray:
    """``L[k]`` = sum of the k smallest eigenvalues, ``L[0] = 0``."""
    return np.concatenate([[0.0], np.cumsum(an.eigenvalues[::-1])])


# ---------------------------------------------------------------------------
# c_k table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CkTable:
    """Running maxima ``c[0..K]`` and candidate constants ``rhs[0..K]``.

    ``K = min(n, available terms)``.  ``avg[k]`` is ``(A_k + L_k) / k`` (with
    ``avg[0] = lam_1``) and ``rhs[k] = (A_k + alpha) / n``.
    """

    n: int
    c: np.ndarray
    rhs: np.ndarray
    avg: np.ndarray

    @property
    def depth(self) -> int:
        return len(self.c) - 1

    @property
    def c_n(self) -> float | None:
        return float(self.c[self.n]) if self.depth == self.n else None


def ck_table(an: FrameAnalysis, a: NormSpec) -> CkTable:
    n = an.n
    K = a.available(n)
    lsum = _smallest_sums(an)
    c = np.empty(K + 1)
    avg = np.empty(K + 1)
    rhs = np.empty(K + 1)
    c[0] = avg[0] = an.lambda_max
    rhs[0] = an.alpha / n
    for k in range(1, K + 1):
        ak = a.prefix_sum(k)
        avg[k] = (ak + lsum[k]) / k
        c[k] = max(c[k - 1], avg[k])
        rhs[k] = (ak + an.alpha) / n
    for arr in (c, avg, rhs):
        arr.setflags(write=False)
    return CkTable(n=n, c=c, rhs=rhs, avg=avg)


# ---------------------------------------------------------------------------
# Feasibility
# ---------------------------------------------------------------------------


def feasibility_violations(an: FrameAnalysis, a: NormSpec, r: int, tol: float = DEFAULT_TOL):
    """Inequalities of the finite-completion criterion that fail for ``r``.

    Each entry is ``(label, candidate_constant, bound)``.  Empty means feasible.
    """
    if r < 1:
        raise DomainError("r must be a positive integer")
    n = an.n
    x = tight_constant(an, a, r)
    lsum = _smallest_sums(an)
    out = []
    if not _geq(x, an.lambda_max, tol):
        out.append(("c >= lambda_1", x, an.lambda_max))
    for k in range(1, min(n, r) + 1):
        bound = (a.prefix_sum(k) + lsum[k]) / k
        if not _geq(x, bound, tol):
            out.append((f"c >= (a_1+..+a_{k} + {k} smallest eigenvalues)/{k}", x, bound))
    return out


def feasible_finite(an: FrameAnalysis, a: NormSpec, r: int, tol: float = DEFAULT_TOL) -> bool:
    """Whether ``r`` vectors with squared norms ``a_1..a_r`` complete the family to a tight frame."""
    return not feasibility_violations(an, a, r, tol)


def feasible_finite_ck(an: FrameAnalysis, a: NormSpec, r: int, tol: float = DEFAULT_TOL) -> bool:
    """Same question answered through the c_k table.

    For ``r < n`` the candidate constant can never exceed ``c_r``, so
    feasibility is the equality ``rhs_r == c_r``; for ``r >= n`` it is
    ``rhs_r >= c_n``.
    """
    if r < 1:
        raise DomainError("r must be a positive integer")
    a._check(r)
    table = ck_table(an, a)
    x = tight_constant(an, a, r)
    if r < an.n:
        return _geq(x, float(table.c[r]), tol) and x <= table.c[r] + tol * (1.0 + abs(x))
    return _geq(x, float(table.c[an.n]), tol)


def feasible_infinite(an: FrameAnalysis, a: NormSpec, tol: float = DEFAULT_TOL) -> bool:
    """Whether an infinite Bessel completion with norms ``a`` exists."""
    if a.length is not None or not a.summable:
        return False
    table = ck_table(an, a)
    x = (a.total_sum + an.alpha) / an.n
    return _geq(x, table.c_n, tol)


# ---------------------------------------------------------------------------
# Minimal count
# ---------------------------------------------------------------------------


def _first_true(pred, lo: int, hi_cap: int | None):
    """Smallest k >= lo with pred(k), assuming pred is monotone; None if none <= hi_cap."""
    cap = MAX_COUNT if hi_cap is None else hi_cap
    if lo > cap:
        return None
    if pred(lo):
        return lo
    step = 1
    prev = lo
    while True:
        cur = min(prev + step, cap)
        if pred(cur):
            break
        if cur == cap:
            return None
        prev = cur
        step *= 2
    # pred(prev) false, pred(cur) true
    while cur - prev > 1:
        mid = (prev + cur) // 2
        if pred(mid):
            cur = mid
        else:
            prev = mid
    return cur


@dataclass(frozen=True)
class CompletabilityReport:
    """Outcome of the minimal-count analysis.

    ``r0`` is a positive int, ``math.inf`` (only an infinite completion works)
    or ``None`` (no completion of any length).  ``case`` names the branch that
    decided it: ``"Case1"`` (``r0 < n``), ``"Case2"`` (``n <= r0 < inf``),
    ``"Case3"`` (``r0 = inf``) or ``"Never"``.
    """

    r0: int | float | None
    case: str
    n: int
    alpha: float
    ck: CkTable
    norms: NormSpec
    residual: float | None = None  # |c_k - rhs_k| (Case1) or |rhs_inf - c_n| (Case3)
    feasible_for_r: dict = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return isinstance(self.r0, int)

    def tight_constant(self, r: int | float) -> float:
        if r == INFINITE:
            return (self.norms.total_sum + self.alpha) / self.n
        return (self.norms.prefix_sum(int(r)) + self.alpha) / self.n


def _case1_consistent(an: FrameAnalysis, table: CkTable, k: int, tol: float) -> bool:
    """Eigenvalue pattern forced by a completion with k < n vectors.

    The top ``n - k`` eigenvalues must all equal the tight constant and
    ``lam_1`` must dominate every average ``(A_j + L_j) / j`` for ``j <= k``.
    A c_k equality that passed the tolerance test but fails this is spurious.
    """
    n = an.n
    x = float(table.rhs[k])
    wide = n * tol
    lam = an.eigenvalues
    if not all(_close(x, float(lam[i]), wide) for i in range(n - k)):
        return False
    return all(_geq(an.lambda_max, float(table.avg[j]), wide) for j in range(1, k + 1))


def _sample_feasibility(an, a, r0, tol, limit=64):
    top = max(2 * an.n, (r0 + 1) if isinstance(r0, int) else 0)
    top = min(a.available(top), max(limit, an.n + 1))
    return {r: feasible_finite(an, a, r, tol) for r in range(1, top + 1)}


def min_count(an: FrameAnalysis, a: NormSpec, tol: float = DEFAULT_TOL, sample: bool = True) -> CompletabilityReport:
    """Minimal number of vectors with squared norms ``a_1, a_2, ...`` giving a tight frame."""
    n = an.n
    table = ck_table(an, a)

    def report(r0, case, residual=None):
        fs = _sample_feasibility(an, a, r0, tol) if sample else {}
        return CompletabilityReport(r0, case, n, an.alpha, table, a, residual, fs)

    for k in range(1, min(n - 1, table.depth) + 1):
        gap = abs(float(table.c[k]) - float(table.rhs[k]))
        if _close(float(table.rhs[k]), float(table.c[k]), tol) and _case1_consistent(an, table, k, tol):
            return report(k, "Case1", gap)

    if table.depth < n:
        return report(None, "Never")
    c_n = float(table.c[n])

    def pred(r):
        return _geq((a.prefix_sum(r) + an.alpha) / n, c_n, tol)

    if a.length is None and a.summable:
        x_inf = (a.total_sum + an.alpha) / n
        if _close(x_inf, c_n, tol):
            return report(INFINITE, "Case3", abs(x_inf - c_n))
        if x_inf < c_n:
            return report(None, "Never", abs(x_inf - c_n))

    if isinstance(a, Constant):
        guess = max(n, math.ceil((n * c_n - an.alpha) / a.value))
        while guess > n and pred(guess - 1):
            guess -= 1
        while not pred(guess):
            guess += 1
        r0 = guess
    else:
        r0 = _first_true(pred, n, a.length)
    if r0 is None:
        return report(None, "Never")
    return report(int(r0), "Case2")


def tail_extension(a: NormSpec, r: int, n: int, tol: float = DEFAULT_TOL):
    """Smallest ``r1 >= n`` completing a family that is already completable with ``r < n``.

    Only the tail ``a_{r+1}, a_{r+2}, ...`` matters: ``r1`` must satisfy
    ``T(r1) / n >= max_{r < k <= n} T(k) / k`` where ``T(m) = a_{r+1} + .. + a_m``.
    Returns an int, ``math.inf`` when only the full infinite tail reaches the
    bound, or ``None``.
    """
    if not 1 <= r < n:
        raise DomainError("tail extension needs 1 <= r < n")
    if a.length is not None and a.length < n:
        return None
    base = a.prefix_sum(r)
    bound = max((a.prefix_sum(k) - base) / k for k in range(r + 1, n + 1))

    def pred(m):
        return _geq((a.prefix_sum(m) - base) / n, bound, tol)

    if a.length is None and a.summable:
        t_inf = (a.total_sum - base) / n
        if _close(t_inf, bound, tol):
            return INFINITE
        if t_inf < bound:
            return None
    r1 = _first_true(pred, n, a.length)
    return None if r1 is None else int(r1)


# ---------------------------------------------------------------------------
# Unit norms
# ---------------------------------------------------------------------------


def unit_norm_min_count(an: FrameAnalysis, tol: float = DEFAULT_TOL) -> int:
    """Minimal number of unit vectors completing the family to a tight frame.

    Returns 0 for a family that is already tight.
    """
    n = an.n
    h = an.h
    lam = an.eigenvalues
    scale = tol * (1.0 + an.lambda_max * n)
    if h <= scale:
        return 0
    hr = round(h)
    if h < n - scale:
        if hr >= 1 and abs(h - hr) <= scale:
            low = float(np.sum(lam[::-1][:hr]))
            if 1.0 + low / hr <= an.lambda_max + scale:
                return int(hr)
        return n
    if abs(h - hr) <= scale:
        return max(int(hr), n)
    return max(math.ceil(h), n)


def untf_span_min_count(p: int, d: int, n: int) -> int:
    """Minimal unit-vector completion of a unit-norm tight frame of ``p`` vectors
    spanning a ``d``-dimensional subspace of R^n."""
    if not (isinstance(p, int) and isinstance(d, int) and isinstance(n, int)):
        raise DomainError("p, d, n must be integers")
    if not (1 <= d < n and p >= d):
        raise DomainError(f"need 1 <= d < n and p >= d, got p={p}, d={d}, n={n}")
    q = Fraction((n - d) * p, d)
    if q < n:
        return int(q) if q.denominator == 1 else n
    return math.ceil(q)
