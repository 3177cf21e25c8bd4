"""Explicit tight completions.

Both routes build an ``n x r`` matrix ``X`` with ``X @ X.T == c I - S`` and
then steer its column norms onto ``a_1..a_r`` with plane rotations, which keep
``X @ X.T`` fixed.  The columns of the result are the completion vectors.

* ``complete_optimal`` factors ``c I - S`` through its eigendecomposition and
  uses the minimal admissible ``r``.
* ``complete_theorem_c`` avoids diagonalization: it bounds ``||S||`` by the
  row-sum norm, inflates ``c`` until the Cholesky factor of ``c I - S`` has all
  column norms above ``a_1`` and then adds as many vectors as the trace needs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import completion
from .completion import NormSpec, feasibility_violations, tight_constant
from .errors import BracketError, BudgetError, InfeasibleError, MajorizationError
from .frames import VectorFamily, analyze, frame_operator
from .linalg import ENDPOINT_RTOL, cholesky_lower, jacobi_eigen, opnorm_upper_bound, rotate_to_target, sym_matrix
from .majorization import SortedSeq, majorizes

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
THEOREM_C = "theorem-c"
LOOP_TOL = 1e-9


def column_norms(x: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->j", x, x)


def rotation_loop(x, targets, tol: float = LOOP_TOL, callback=None):
    """Rotate the columns of ``x`` until their squared norms are ``targets``.

    ``targets`` must be non-increasing, have one entry per column and be
    majorized by the current column norms.  At each step the largest open
    target ``t`` is placed by rotating the two open columns whose norms are
    adjacent to ``t`` (the smallest one above it and the largest one below).
    This pairing keeps the remaining targets majorized by the remaining norms;
    pairing the extreme columns instead does not.

    Returns ``(y, rotations)`` with column ``i`` of ``y`` carrying ``targets[i]``.
    ``callback(y)`` is invoked after every rotation.
    """
    y = np.array(x, dtype=float)
    a = np.asarray(targets, dtype=float)
    r = y.shape[1]
    if a.shape != (r,):
        raise ValueError(f"{r} columns but {a.size} targets")
    norms = column_norms(y)
    slack = tol * (1.0 + float(np.sum(np.abs(a))))
    open_cols = list(range(r))
    placed = [-1] * r
    rotations = 0

    for ti in range(r):
        t = float(a[ti])
        if len(open_cols) == 1:
            placed[ti] = open_cols.pop()
            break
        nearest = min(open_cols, key=lambda col: abs(norms[col] - t))
        if abs(norms[nearest] - t) <= ENDPOINT_RTOL * max(t, norms[nearest], 1e-300):
            open_cols.remove(nearest)
            placed[ti] = nearest
            continue
        above = [col for col in open_cols if norms[col] > t]
        below = [col for col in open_cols if norms[col] < t]
        if not above or not below:
            if abs(norms[nearest] - t) > slack:
                raise BracketError(
                    f"target {t:.17g} outside open column norms "
                    f"[{min(norms[open_cols]):.17g}, {max(norms[open_cols]):.17g}]"
                )
            open_cols.remove(nearest)
            placed[ti] = nearest
            continue
        hi = min(above, key=lambda col: norms[col])
        lo = max(below, key=lambda col: norms[col])
        y, fixed = rotate_to_target(y, hi, lo, t)
        rotations += 1
        norms[hi] = y[:, hi] @ y[:, hi]
        norms[lo] = y[:, lo] @ y[:, lo]
        open_cols.remove(fixed)
        placed[ti] = fixed
        if callback is not None:
            callback(y)

    if rotations > max(r - 1, 0):
        log.warning("rotation loop used %d rotations for %d columns", rotations, r)
    return y[:, placed], rotations


def realize_bessel(target_gram, a, tol: float = LOOP_TOL, callback=None):
    """Columns with squared norms ``a`` whose outer-product sum is ``target_gram``.

    ``a`` (non-increasing) must be majorized by the spectrum of ``target_gram``.
    Returns ``(y, rotations)``.
    """
    s = sym_matrix(target_gram)
    n = s.shape[0]
    a_seq = a if isinstance(a, SortedSeq) else SortedSeq(np.asarray(a, dtype=float))
    r = len(a_seq)
    eig = jacobi_eigen(s)
    lam = np.clip(eig.values, 0.0, None)
    if not majorizes(SortedSeq(lam), a_seq, tol):
        raise MajorizationError(
            f"norms {np.array2string(a_seq.values, precision=6)} are not majorized by "
            f"spectrum {np.array2string(lam, precision=6)}"
        )
    x = eig.vectors * np.sqrt(lam)
    if r >= n:
        x = np.hstack([x, np.zeros((n, r - n))])
    else:
        # the dropped columns carry eigenvalues that majorization forces to zero
        x = x[:, :r]
    return rotation_loop(x, a_seq.values, tol, callback)


@dataclass(frozen=True)
class CompletionCertificate:
    vectors: np.ndarray  # (r, n), row i is g_i
    c: float
    r: int
    norm_residual: float
    tightness_residual: float
    method: str
    rotation_count: int
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "r": self.r,
            "c": self.c,
            "vectors": self.vectors.tolist(),
            "norm_residual": self.norm_residual,
            "tightness_residual": self.tightness_residual,
            "rotation_count": self.rotation_count,
            **self.extras,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CompletionCertificate":
        vectors = np.array(d["vectors"], dtype=float)
        vectors = vectors.reshape(len(vectors), -1) if vectors.size else np.zeros((0, 0))
        extras = {k: v for k, v in d.items() if k not in {
            "method", "r", "c", "vectors", "norm_residual", "tightness_residual", "rotation_count"}}
        return cls(
            vectors=vectors,
            c=float(d["c"]),
            r=int(d.get("r", len(d["vectors"]))),
            norm_residual=float(d.get("norm_residual", float("nan"))),
            tightness_residual=float(d.get("tightness_residual", float("nan"))),
            method=str(d.get("method", OPTIMAL)),
            rotation_count=int(d.get("rotation_count", 0)),
            extras=extras,
        )


def _certificate(f: VectorFamily, y: np.ndarray, a_head: np.ndarray, c: float, method: str, rotations: int, **extras):
    g = np.ascontiguousarray(y.T)
    norms = column_norms(y)
    union = f.union(g)
    tight = float(np.max(np.abs(frame_operator(union) - c * np.eye(f.dim))))
    g.setflags(write=False)
    return CompletionCertificate(
        vectors=g,
        c=float(c),
        r=int(g.shape[0]),
        norm_residual=float(np.max(np.abs(norms - a_head))) if len(a_head) else 0.0,
        tightness_residual=tight,
        method=method,
        rotation_count=rotations,
        extras=extras,
    )


def complete_optimal(f: VectorFamily, a: NormSpec, r: int | None = None, tol: float = completion.DEFAULT_TOL, callback=None):
    """Completion by ``r`` vectors through the eigendecomposition of ``c I - S``.

    ``r`` defaults to the minimal count.
    """
    an = analyze(f)
    if r is None:
        rep = completion.min_count(an, a, tol, sample=False)
        if not rep.finite:
            raise InfeasibleError(f"no finite completion exists (r0 = {rep.r0}, {rep.case})")
        r = rep.r0
    if a.length is not None and r > a.length:
        raise BudgetError(f"norm list has {a.length} terms, r = {r} requested")
    bad = feasibility_violations(an, a, r, tol)
    if bad:
        label, x, bound = bad[0]
        raise InfeasibleError(f"not completable with r = {r}: {label} fails ({x:.17g} < {bound:.17g})")
    c = tight_constant(an, a, r)
    a_head = a.head(r)
    y, rotations = realize_bessel(c * np.eye(f.dim) - an.op, a_head, LOOP_TOL, callback)
    return _certificate(f, y, a_head, c, OPTIMAL, rotations)


def theorem_c_count(f: VectorFamily, a: NormSpec, beta: float = 1.0, exact_norm: bool = False):
    """Bracketing step of the Cholesky route: returns ``(d, c, r)``.

    ``d`` bounds ``||S||``, ``c = max(d + beta, d + a_1)`` and ``r`` is the
    unique index with ``A_{r-1} < c n - tr S <= A_r``.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    s = frame_operator(f)
    n = f.dim
    d = float(jacobi_eigen(s).values[0]) if exact_norm else opnorm_upper_bound(s)
    c = max(d + beta, d + a.first)
    need = c * n - float(np.trace(s))
    r = completion._first_true(lambda k: a.prefix_sum(k) >= need, 1, a.length)
    if r is None:
        raise BudgetError(f"partial sums of the norm sequence never reach {need:.17g}")
    return d, c, int(r)


def complete_theorem_c(f: VectorFamily, a: NormSpec, beta: float = 1.0, exact_norm: bool = False, callback=None):
    """Diagonalization-free completion via a Cholesky factor of ``c I - S``."""
    d, c0, r = theorem_c_count(f, a, beta, exact_norm)
    n = f.dim
    s = frame_operator(f)
    alpha = float(np.sum(f.vectors * f.vectors))
    c = (a.prefix_sum(r) + alpha) / n
    L = cholesky_lower(c * np.eye(n) - s, beta / 2.0)
    x = np.hstack([L, np.zeros((n, r - n))])
    a_head = a.head(r)
    b = SortedSeq.from_unsorted(column_norms(x))
    if not majorizes(b, SortedSeq(a_head)):
        raise MajorizationError("Cholesky column norms do not majorize the target norms")
    y, rotations = rotation_loop(x, a_head, LOOP_TOL, callback)
    return _certificate(f, y, a_head, c, THEOREM_C, rotations, norm_bound=d, initial_c=c0, beta=beta)


@dataclass(frozen=True)
class VerificationReport:
    norm_residual: float
    tightness_residual: float
    c_expected: float
    c_error: float
    rotation_count: int
    checks: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": dict(self.checks),
            "norm_residual": self.norm_residual,
            "tightness_residual": self.tightness_residual,
            "c_expected": self.c_expected,
            "c_error": self.c_error,
        }


def verify(f: VectorFamily, cert: CompletionCertificate, a: NormSpec) -> VerificationReport:
    """Recompute every certificate quantity from scratch; failures are reported, not raised."""
    g = np.asarray(cert.vectors, dtype=float).reshape(-1, f.dim) if np.size(cert.vectors) else np.zeros((0, f.dim))
    r = g.shape[0]
    checks = {"count_matches": r == cert.r}
    try:
        a_head = a.head(r)
    except BudgetError:
        a_head = None
    checks["norms_available"] = a_head is not None
    norms = np.einsum("ij,ij->i", g, g)
    norm_res = float(np.max(np.abs(norms - a_head))) if a_head is not None and r else 0.0
    alpha = float(np.sum(f.vectors * f.vectors))
    c_expected = ((float(np.sum(a_head)) if a_head is not None else float("nan")) + alpha) / f.dim
    tight = float(np.max(np.abs(frame_operator(f.union(g)) - cert.c * np.eye(f.dim))))
    a1 = float(a_head[0]) if a_head is not None and r else 0.0
    c_err = abs(cert.c - c_expected)
    checks["norm_residual"] = norm_res <= 1e-9 * (1.0 + a1)
    checks["tightness_residual"] = tight <= 1e-8 * (1.0 + abs(cert.c))
    checks["tight_constant"] = c_err <= 1e-10 * (1.0 + abs(c_expected))
    checks["rotation_count"] = cert.rotation_count <= max(r - 1, 0)
    return VerificationReport(norm_res, tight, c_expected, c_err, cert.rotation_count, checks)
