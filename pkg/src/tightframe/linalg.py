"""Dense real symmetric kernels: cyclic Jacobi, Cholesky, a row-sum norm bound
and the norm-steering plane rotation used by the completion constructors.

Everything here works on small dense numpy arrays; nothing is tuned for n in
the hundreds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketError, DomainError, EigenConvergenceError, PositivityError

MAX_SWEEPS = 100


def sym_matrix(m) -> np.ndarray:
    """Return a float copy of ``m`` made exactly symmetric by averaging."""
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DomainError(f"expected a non-empty square matrix, got shape {a.shape}")
    return 0.5 * (a + a.T)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class EigenDecomp:
    values: np.ndarray  # non-increasing
    vectors: np.ndarray  # column i pairs with values[i]
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def _off_norm(a: np.ndarray) -> float:
    upper = a[np.triu_indices(a.shape[0], 1)]
    return math.sqrt(2.0) * float(np.linalg.norm(upper))


def jacobi_eigen(m, tol: float = 1e-12) -> EigenDecomp:
    """Cyclic Jacobi eigendecomposition of a real symmetric matrix.

    Pairs (p, q) are visited in row-major order in every sweep.  Iteration
    stops once the off-diagonal Frobenius mass falls to ``tol`` times the
    Frobenius norm of the input.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    a = sym_matrix(m)
    n = a.shape[0]
    v = np.eye(n)
    target = tol * float(np.linalg.norm(a))

    sweeps = 0
    while _off_norm(a) > target:
        if sweeps >= MAX_SWEEPS:
            raise EigenConvergenceError(
                f"Jacobi did not converge in {MAX_SWEEPS} sweeps "
                f"(off-diagonal mass {_off_norm(a):.3e}, target {target:.3e})"
            )
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app, aqq = a[p, p], a[q, q]
                diff = aqq - app
                if abs(diff) > 1e300 * abs(apq):
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0

                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq

    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    return EigenDecomp(
        values=_frozen(values[order]),
        vectors=_frozen(v[:, order].copy()),
        sweeps=sweeps,
    )


def cholesky_lower(m, min_pivot: float = 0.0) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == m``.

    A pivot (the diagonal Schur complement before the square root) that is
    ``<= min_pivot`` raises :class:`PositivityError`.
    """
    a = sym_matrix(m)
    n = a.shape[0]
    L = np.zeros_like(a)
    for j in range(n):
        pivot = a[j, j] - L[j, :j] @ L[j, :j]
        if not pivot > min_pivot:
            raise PositivityError(
                f"pivot {pivot:.6g} at column {j} is not above the floor {min_pivot:.6g}"
            )
        L[j, j] = math.sqrt(pivot)
        if j + 1 < n:
            L[j + 1 :, j] = (a[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def opnorm_upper_bound(m) -> float:
    """Induced infinity norm (max absolute row sum); dominates the spectral norm."""
    a = sym_matrix(m)
    return float(np.max(np.sum(np.abs(a), axis=1)))


# Relative window in which a target counts as already equal to a column norm.
ENDPOINT_RTOL = 1e-13


def rotate_to_target(x, j: int, k: int, t: float, slack: float = 1e-12):
    """Rotate columns ``j`` and ``k`` of ``x`` so that one of them has squared norm ``t``.

    Returns ``(x_new, fixed)`` where ``fixed`` is the index (``j`` or ``k``) of
    the column now carrying squared norm ``t``.  The rotation acts on the right,
    so ``x_new @ x_new.T == x @ x.T`` and the two squared norms keep their sum.

    ``t`` must lie between the two current squared norms; targets outside the
    bracket by at most ``slack`` (relative) are snapped to the nearest endpoint.
    """
    x = np.array(x, dtype=float)
    if j == k:
        raise DomainError("rotation needs two distinct columns")
    bj = float(x[:, j] @ x[:, j])
    bk = float(x[:, k] @ x[:, k])
    hi, lo = (j, k) if bj >= bk else (k, j)
    b_hi, b_lo = max(bj, bk), min(bj, bk)
    scale = max(b_hi, abs(t), np.finfo(float).tiny)

    if t < b_lo - slack * scale or t > b_hi + slack * scale:
        raise BracketError(
            f"target {t:.17g} outside [{b_lo:.17g}, {b_hi:.17g}] for columns {j}, {k}"
        )
    if t >= b_hi - ENDPOINT_RTOL * scale:
        return x, hi
    if t <= b_lo + ENDPOINT_RTOL * scale:
        return x, lo

    u = x[:, hi].copy()
    w = x[:, lo].copy()
    gamma = float(u @ w)
    lead = b_lo - t  # < 0
    const = b_hi - t  # > 0
    disc = gamma * gamma - lead * const
    q = -(gamma + math.copysign(math.sqrt(disc), gamma))
    if abs(lead) > 1e-14 * scale:
        tau = q / lead
    else:
        tau = const / q
    c = 1.0 / math.hypot(1.0, tau)
    s = tau * c
    x[:, hi] = c * u + s * w
    x[:, lo] = -s * u + c * w
    return x, hi
