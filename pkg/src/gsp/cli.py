"""Command line interface: ``gsp bounds``, ``gsp verify`` and ``gsp sweep``.

Exit status is 0 on success, 1 for bad input (files, shapes, arguments) and
2 for numerical failures.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import InputError, NumericalError
from .problem import load_problem
from .report import (
    ORDER_CHOICES,
    ReportOptions,
    emit_sweep_csv,
    monte_carlo_verify,
    run_report,
    sweep_epsilon,
)

LARGE_N = 30


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (exit 1); 2 is reserved for numerics
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="gsp", description="Componentwise perturbation bounds for the generalized Schur decomposition.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bounds", help="compute a bound report for a problem file")
    b.add_argument("--input", required=True, help="problem file, or a built-in name (sun5, schur5)")
    b.add_argument("--linear", action="store_true", help="first-order bounds")
    b.add_argument("--nonlinear", action="store_true", help="fixed-point refined bounds")
    b.add_argument("--compare", action="store_true", help="classical comparison quantities")
    b.add_argument("--exact", action="store_true", help="exact perturbations by refactorization")
    b.add_argument("--p", type=_int_list, default=None, help="subspace dimensions, e.g. 1,2,3 (default all)")
    b.add_argument("--order", choices=ORDER_CHOICES, default="printed")
    b.add_argument("--tol", type=float, default=1e-12)
    b.add_argument("--max-iter", type=int, default=30)
    b.add_argument("--format", choices=("table", "json", "csv"), default="table")
    b.add_argument("--out", default=None, help="write the report here instead of stdout")
    b.add_argument("--strict", action="store_true", help="treat non-convergence as an error")

    v = sub.add_parser("verify", help="Monte-Carlo check of the linear bounds")
    v.add_argument("--input", required=True)
    v.add_argument("--eps", type=float, required=True)
    v.add_argument("--samples", type=int, required=True)
    v.add_argument("--seed", type=int, required=True)
    v.add_argument("--factor", type=float, default=1.01)
    v.add_argument("--order", choices=ORDER_CHOICES, default="printed")

    s = sub.add_parser("sweep", help="tabulate bound and exact value against eps (CSV)")
    s.add_argument("--input", required=True)
    s.add_argument("--eps", type=_float_list, required=True, help="comma-separated perturbation sizes")
    s.add_argument("--quantity", default="x", help="x, y, U, V, T, R, t, r or theta:p")
    s.add_argument("--order", choices=ORDER_CHOICES, default="printed")
    s.add_argument("--out", default=None)
    return ap


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _bounds(args) -> None:
    problem = load_problem(args.input)
    _warn_size(problem.n)
    sections = (args.linear, args.nonlinear, args.compare, args.exact)
    everything = not any(sections)
    opts = ReportOptions(
        linear=everything or args.linear, nonlinear=everything or args.nonlinear,
        compare=everything or args.compare, exact=everything or args.exact,
        ps=args.p, order=args.order, tol=args.tol, max_iter=args.max_iter, strict=args.strict,
    )
    if opts.ps is not None and any(not (1 <= p <= problem.n - 1) for p in opts.ps):
        raise InputError(f"--p values must lie in 1..{problem.n - 1}")
    _emit(run_report(problem, opts).render(args.format), args.out)


def _verify(args) -> None:
    problem = load_problem(args.input)
    _warn_size(problem.n)
    if args.eps <= 0 or args.samples < 1:
        raise InputError("--eps must be positive and --samples at least 1")
    res = monte_carlo_verify(problem, args.eps, args.samples, args.seed, factor=args.factor, order=args.order)
    lines = [f"eps={res.eps:g} samples={res.samples} seed={res.seed} factor={res.factor:g}",
             f"{'bound':>6} {'violations':>10} {'worst exact/bound':>18}"]
    for k in res.violations:
        lines.append(f"{k:>6} {res.violations[k]:>10d} {res.worst_ratio[k]:>18.6f}")
    lines.append(f"total violations: {res.total_violations}")
    for s, kind, msg in res.failures:
        lines.append(f"sample {s} failed: {kind}: {msg}")
    sys.stdout.write("\n".join(lines) + "\n")


def _sweep(args) -> None:
    problem = load_problem(args.input)
    _warn_size(problem.n)
    if any(e <= 0 for e in args.eps):
        raise InputError("--eps values must be positive")
    try:
        rows = sweep_epsilon(problem, args.eps, args.quantity, order=args.order)
    except ValueError as exc:
        if isinstance(exc, NumericalError):
            raise
        raise InputError(str(exc)) from exc
    _emit(emit_sweep_csv(rows), args.out)


def _warn_size(n: int) -> None:
    if n > LARGE_N:
        print(f"gsp: warning: n={n} > {LARGE_N}; L has size {n * (n - 1)} and the dense inverse is slow",
              file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"bounds": _bounds, "verify": _verify, "sweep": _sweep}[args.command]
    try:
        handler(args)
    except NumericalError as exc:
        print(f"gsp: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (InputError, ValueError, OSError) as exc:
        print(f"gsp: input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
