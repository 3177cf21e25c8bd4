"""Command line front end.

Problem files are UTF-8 JSON::

    {
      "vectors": [[1.4142135623730951, 0, 0], [0, 1.4142135623730951, 0], [0, 0, 1]],
      "dim": 3,                               # optional unless vectors is empty
      "norms": {"kind": "geometric", "first": 1, "ratio": 0.25},
      "options": {"tol": 1e-9, "beta": 1.0, "method": "optimal"}
    }

``vectors`` may also be a string naming a CSV file (one vector per row),
resolved relative to the problem file.  Exit codes: 0 success, 2 infeasible,
3 parse error, 4 numerical failure (including a failed verification).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import completion, constructor
from .errors import BudgetError, DomainError, InfeasibleError, NumericalError, TightFrameError, MajorizationError
from .frames import VectorFamily, analyze

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_PARSE = 3
EXIT_NUMERICAL = 4


class ParseError(TightFrameError):
    pass


# ---------------------------------------------------------------------------
# Deterministic JSON output
# ---------------------------------------------------------------------------


def _fmt(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"infinite"' if x > 0 else '"-infinite"'
        if x == 0.0:
            return "0.0"
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return _fmt(obj.tolist(), indent)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_fmt(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_fmt(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + _fmt(v, indent + 1) for v in obj) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return _fmt(obj) + "\n"


# ---------------------------------------------------------------------------
# Problem files
# ---------------------------------------------------------------------------


class Problem:
    def __init__(self, family: VectorFamily, norms: completion.NormSpec, options: dict):
        self.family = family
        self.norms = norms
        self.options = options


def _read_json(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    return data


def _read_csv_vectors(path: Path) -> list:
    rows = []
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                cells = [c.strip() for c in row if c.strip()]
                if not cells or cells[0].startswith("#"):
                    continue
                try:
                    rows.append([float(c) for c in cells])
                except ValueError as exc:
                    raise ParseError(f"{path}:{lineno}: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return rows


def load_problem(path, dim: int | None = None) -> Problem:
    path = Path(path)
    data = _read_json(path)
    if "norms" not in data:
        raise ParseError(f"{path}: missing 'norms'")
    raw = data.get("vectors", [])
    if isinstance(raw, str):
        raw = _read_csv_vectors((path.parent / raw) if not Path(raw).is_absolute() else Path(raw))
    dim = dim if dim is not None else data.get("dim")
    try:
        family = VectorFamily.from_rows(raw, dim=dim)
        norms = completion.norm_spec_from_dict(data["norms"])
    except (DomainError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    options = dict(data.get("options", {}))
    return Problem(family, norms, options)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _tol(args, prob) -> float:
    if args.tol is not None:
        return args.tol
    return float(prob.options.get("tol", completion.DEFAULT_TOL))


def _beta(args, prob) -> float:
    if args.beta is not None:
        return args.beta
    return float(prob.options.get("beta", 1.0))


def _r0_json(r0):
    if r0 is None:
        return "never"
    if r0 == math.inf:
        return "infinite"
    return int(r0)


def cmd_analyze(args, prob: Problem) -> dict:
    tol = _tol(args, prob)
    an = analyze(prob.family)
    table = completion.ck_table(an, prob.norms)
    n = an.n
    out = {
        "n": n,
        "p": len(prob.family),
        "alpha": an.alpha,
        "spectrum": an.eigenvalues,
        "h": an.h,
        "c": table.c,
        "rhs": table.rhs[1:],
        "opnorm_upper_bound": float(np.max(np.sum(np.abs(an.op), axis=1))),
    }
    if prob.norms.summable and prob.norms.length is None:
        out["rhs_infinite"] = (prob.norms.total_sum + an.alpha) / n
    if isinstance(prob.norms, completion.Constant) and prob.norms.value == 1.0:
        out["unit_norm_min_count"] = completion.unit_norm_min_count(an, tol)
        out["cholesky_route_count_exact_norm"] = math.ceil(n * (an.lambda_max + 1.0) - an.alpha)
    return out


def cmd_min_count(args, prob: Problem) -> dict:
    tol = _tol(args, prob)
    an = analyze(prob.family)
    rep = completion.min_count(an, prob.norms, tol)
    out = {"r0": _r0_json(rep.r0), "case": rep.case}
    if rep.r0 is not None:
        out["c"] = rep.tight_constant(rep.r0)
    out["residual"] = rep.residual
    out["feasible_for_r"] = {str(k): v for k, v in rep.feasible_for_r.items()}
    return out


def cmd_feasible(args, prob: Problem) -> dict:
    tol = _tol(args, prob)
    an = analyze(prob.family)
    if args.r is None:
        return {"r": "infinite", "feasible": completion.feasible_infinite(an, prob.norms, tol)}
    bad = completion.feasibility_violations(an, prob.norms, args.r, tol)
    return {
        "r": args.r,
        "feasible": not bad,
        "c": completion.tight_constant(an, prob.norms, args.r),
        "violations": [{"condition": lbl, "c": x, "bound": b} for lbl, x, b in bad],
    }


def cmd_complete(args, prob: Problem) -> dict:
    method = args.method or prob.options.get("method", constructor.OPTIMAL)
    if method == constructor.THEOREM_C:
        cert = constructor.complete_theorem_c(
            prob.family, prob.norms, beta=_beta(args, prob), exact_norm=args.exact_norm)
    elif method == constructor.OPTIMAL:
        cert = constructor.complete_optimal(prob.family, prob.norms, args.r, tol=_tol(args, prob))
    else:
        raise ParseError(f"unknown method {method!r}")
    return cert.to_dict()


def cmd_verify(args, prob: Problem) -> dict:
    data = _read_json(Path(args.certificate))
    try:
        cert = constructor.CompletionCertificate.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{args.certificate}: {exc}") from exc
    return constructor.verify(prob.family, cert, prob.norms).to_dict()


COMMANDS = {
    "analyze": cmd_analyze,
    "min-count": cmd_min_count,
    "feasible": cmd_feasible,
    "complete": cmd_complete,
    "verify": cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    # usage errors are parse errors; argparse's default status 2 would read as "infeasible"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tightframe", description="Tight frame completions with prescribed norms.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("problem", help="problem JSON file")
        p.add_argument("--tol", type=float, default=None, help="relative tolerance for equality tests")
        p.add_argument("--dim", type=int, default=None, help="ambient dimension (required when there are no vectors)")
        p.add_argument("--out", default=None, help="write the JSON result here instead of stdout")
        return p

    common(sub.add_parser("analyze", help="spectrum, trace, h and the c_k table"))
    common(sub.add_parser("min-count", help="minimal number of completion vectors"))
    p = common(sub.add_parser("feasible", help="feasibility for a given r (omit --r for an infinite completion)"))
    p.add_argument("--r", type=int, default=None)
    p = common(sub.add_parser("complete", help="construct a completion certificate"))
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--method", choices=[constructor.OPTIMAL, constructor.THEOREM_C], default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--exact-norm", action="store_true", help="use the exact operator norm in the Cholesky route")
    p = common(sub.add_parser("verify", help="check a certificate against a problem"))
    p.add_argument("certificate")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    status = EXIT_OK
    try:
        prob = load_problem(args.problem, args.dim)
        result = COMMANDS[args.command](args, prob)
        if args.command == "verify" and not result["passed"]:
            status = EXIT_NUMERICAL
    except ParseError as exc:
        result, status = {"error": "parse", "reason": str(exc)}, EXIT_PARSE
    except (InfeasibleError, BudgetError) as exc:
        result, status = {"error": type(exc).__name__, "reason": str(exc)}, EXIT_INFEASIBLE
    except (NumericalError, MajorizationError) as exc:
        result, status = {"error": type(exc).__name__, "reason": str(exc)}, EXIT_NUMERICAL
    except DomainError as exc:
        result, status = {"error": "parse", "reason": str(exc)}, EXIT_PARSE

    text = dumps(result)
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if status != EXIT_OK:
        print(result.get("reason", "verification failed"), file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
