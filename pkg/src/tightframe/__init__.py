"""Tight frame completions with prescribed norms."""

from .completion import (
    CkTable,
    CompletabilityReport,
    Constant,
    FiniteList,
    Geometric,
    NormSpec,
    ck_table,
    feasible_finite,
    feasible_finite_ck,
    feasible_infinite,
    min_count,
    tail_extension,
    unit_norm_min_count,
    untf_span_min_count,
)
from .constructor import (
    CompletionCertificate,
    complete_optimal,
    complete_theorem_c,
    realize_bessel,
    rotation_loop,
    verify,
)
from .errors import (
    BracketError,
    BudgetError,
    DomainError,
    EigenConvergenceError,
    InfeasibleError,
    MajorizationError,
    PositivityError,
)
from .frames import FrameAnalysis, VectorFamily, analyze, frame_operator, tightness_residual
from .linalg import EigenDecomp, cholesky_lower, jacobi_eigen, opnorm_upper_bound, rotate_to_target
from .majorization import SortedSeq, majorizes, zero_tail_check

__version__ = "0.1.0"
