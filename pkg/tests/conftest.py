from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from tightframe import Constant, FiniteList, Geometric, VectorFamily

DATA = Path(__file__).parent / "data"
SQRT2 = math.sqrt(2.0)

_ACCEPTANCE_LINES: list[str] = []


def scaled_basis_family() -> VectorFamily:
    return VectorFamily.from_rows([[SQRT2, 0, 0], [0, SQRT2, 0], [0, 0, 1]])


def mercedes_family(theta: float = 2 * math.pi / 3) -> VectorFamily:
    return VectorFamily.from_rows([[1.0, 0.0], [math.cos(theta), math.sin(theta)]])


def random_family(rng, n: int, p: int, unit: bool = False) -> VectorFamily:
    v = rng.standard_normal((p, n))
    if unit and p:
        v /= np.linalg.norm(v, axis=1, keepdims=True)
    return VectorFamily(n, v)


def random_spec(rng, min_len: int = 1):
    kind = rng.integers(3)
    if kind == 0:
        return Constant(float(rng.uniform(0.2, 3.0)))
    if kind == 1:
        return Geometric(float(rng.uniform(0.2, 5.0)), float(rng.uniform(0.3, 0.95)))
    m = int(rng.integers(max(min_len, 1), max(min_len, 1) + 30))
    return FiniteList(tuple(np.sort(rng.uniform(0.05, 3.0, m))[::-1]))


def planted_case1(rng, n: int, r: int, extra: int = 10):
    """A family plus a norm list for which exactly ``r < n`` vectors complete it.

    Random vectors ``g_1..g_r`` are drawn, ``c`` is set above the spectrum of
    their frame operator and ``F`` is any factor of ``c I - S_G``.
    """
    g = rng.standard_normal((r, n))
    sg = g.T @ g
    c = float(np.linalg.eigvalsh(sg)[-1]) + float(rng.uniform(0.0, 1.0))
    w, q = np.linalg.eigh(c * np.eye(n) - sg)
    f = (q * np.sqrt(np.clip(w, 0, None))).T
    norms = np.sort(np.einsum("ij,ij->i", g, g))[::-1]
    tail = np.sort(norms[-1] * rng.uniform(0.01, 1.0, extra))[::-1]
    return VectorFamily(n, f), FiniteList(tuple(np.concatenate([norms, tail]))), c


def harmonic_untf(p: int, d: int) -> np.ndarray:
    """Unit-norm tight frame of ``p`` vectors in R^d (rows), tight constant p/d."""
    if p == d:
        return np.eye(d)
    j = np.arange(p)[:, None]
    m = d // 2
    freqs = np.arange(1, m + 1)[None, :]
    ang = 2 * np.pi * j * freqs / p
    parts = []
    if d % 2:
        parts.append(np.full((p, 1), 1.0 / math.sqrt(d)))
    trig = np.empty((p, 2 * m))
    trig[:, 0::2] = np.cos(ang)
    trig[:, 1::2] = np.sin(ang)
    parts.append(math.sqrt(2.0 / d) * trig)
    return np.hstack(parts)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion(request):
    """Record one acceptance line; assertion failures still fail the test."""

    def record(name: str, ok: bool, detail: str = ""):
        _ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
        assert ok, f"{name}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
