"""Command-line front end.

Exit codes: 0 success (including informative outcomes such as an infeasible
oracle problem), 2 usage error, 3 validation or range error, 4 numerical
failure inside the LP solver.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import sys
from typing import Optional, Sequence

from . import bounds, constructions, lhv, montecarlo, oracle, quantum
from .errors import ChainBellError, SolverError

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERIC = 0, 2, 3, 4


class Formatter:
    def __init__(self, digits: int = 8):
        self.digits = digits

    def num(self, x) -> str:
        if x is None:
            return "undefined"
        if isinstance(x, bool) or isinstance(x, int):
            return str(x)
        if isinstance(x, float):
            return f"{x:.{self.digits}f}"
        return str(x)


def emit_rows(out, kind: str, header: list[str], rows: list[list], fmt: Formatter, extra: Optional[dict] = None):
    if kind == "json":
        obj = dict(extra or {})
        obj["rows"] = [dict(zip(header, r)) for r in rows]
        out.write(json.dumps(obj, indent=2) + "\n")
        return
    cells = [[fmt.num(v) for v in r] for r in rows]
    if kind == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(cells)
        return
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h) for i, h in enumerate(header)]
    out.write("  ".join(h.rjust(wd) for h, wd in zip(header, widths)) + "\n")
    for r in cells:
        out.write("  ".join(c.rjust(wd) for c, wd in zip(r, widths)) + "\n")


def parse_n_range(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or NMIN..NMAX, got {text!r}") from None
    if lo < 2 or hi < lo:
        raise argparse.ArgumentTypeError(f"need 2 <= NMIN <= NMAX, got {text!r}")
    return lo, hi


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (stop inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int((stop - start) / step + 1e-9) + 1
            return [round(start + i * step, 12) for i in range(count)]
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:STOP:STEP or a comma list, got {text!r}") from None


def _model_summary(model: lhv.LhvModel, visibility: float, tol: float, independence: bool) -> dict:
    stats = lhv.evaluate(model)
    report = lhv.check_qm_constraints(stats, model.n_settings, visibility, tol, independence)
    return {"components": dict(model.components), "stats": stats.to_dict(), "qm_check": report.to_dict()}


def _print_summary(out, summary: dict, kind: str, fmt: Formatter) -> None:
    if kind == "json":
        out.write(json.dumps(summary, indent=2) + "\n")
        return
    stats = summary["stats"]
    rows = []
    for name, w in summary["components"].items():
        rows.append([f"weight[{name}]", w])
    rows += [["beta", stats["beta"]], ["eta_a", stats["eta_a"]], ["eta_b", stats["eta_b"]]]
    for group in ("a_detection_probs", "b_detection_probs"):
        rows += [[f"P(det {key})", v] for key, v in stats[group].items()]
    for group in ("a_marginals", "b_marginals"):
        rows += [[f"E({key})", v] for key, v in stats[group].items()]
    for key, v in stats["pair_correlations"].items():
        rows.append([f"E({key})", v])
    for key, v in summary["qm_check"].items():
        rows.append([f"qm.{key}", v])
    emit_rows(out, kind, ["quantity", "value"], rows, fmt)


def cmd_bounds(args, out, fmt) -> int:
    lo, hi = args.n
    rows = []
    for n in range(lo, hi + 1):
        beta_q = quantum.quantum_beta(n, args.visibility)
        try:
            eta = bounds.eta_bound_from_beta(n, beta_q, args.eta_b)
        except ChainBellError:
            eta = None
        rows.append([n, quantum.violation_ratio(n, args.visibility), beta_q, eta, quantum.critical_visibility(n)])
    col = "eta_crit" if args.eta_b is None else "eta_a_crit"
    header = ["N", "D", "beta_q", col, "v_crit"]
    emit_rows(out, args.format, header, rows, fmt, {"visibility": args.visibility, "eta_b": args.eta_b})
    return EXIT_OK


def _build_model(args) -> lhv.LhvModel:
    if args.eta is not None:
        return constructions.symmetric_model(args.n, args.eta, args.beta_target)
    return constructions.asymmetric_model(args.n, args.eta_a, args.eta_b, args.beta_target)


def cmd_model(args, out, fmt) -> int:
    model = _build_model(args)
    if args.out:
        lhv.save_model(model, args.out)
    _print_summary(out, _model_summary(model, args.visibility, args.tol, not args.no_independence), args.format, fmt)
    return EXIT_OK


def cmd_eval(args, out, fmt) -> int:
    model = lhv.load_model(args.model)
    _print_summary(out, _model_summary(model, args.visibility, args.tol, not args.no_independence), args.format, fmt)
    return EXIT_OK


def cmd_simulate(args, out, fmt) -> int:
    model = lhv.load_model(args.model)
    report = montecarlo.simulate(model, montecarlo.SimConfig(args.trials, args.seed, args.workers))
    out.write(json.dumps(report.to_dict(), indent=2) + "\n")
    return EXIT_OK


def cmd_oracle(args, out, fmt) -> int:
    problem = oracle.OracleProblem(
        args.n,
        args.eta_a,
        args.eta_b,
        args.mode,
        tolerance=args.lp_tol,
        orientation=args.orientation,
        relax_singles=args.relax_singles,
    )
    sol = oracle.solve(problem)
    if sol.witness is not None and args.witness:
        lhv.save_model(sol.witness, args.witness)
    rows = [
        ["status", sol.status],
        ["beta_max", sol.beta_max],
        ["beta_bound", bounds.beta_max_lhv(args.n, args.eta_a, args.eta_b)],
        ["support", len(sol.witness.weighted_states) if sol.witness else None],
        ["pivots", sol.iterations],
    ]
    emit_rows(out, args.format, ["quantity", "value"], rows, fmt)
    return EXIT_OK


def cmd_sweep(args, out, fmt) -> int:
    lo, hi = args.n
    rows = []
    for n in range(lo, hi + 1):
        for eta in args.eta:
            ea = eta
            eb = eta if args.eta_b is None else args.eta_b
            bound = bounds.beta_max_lhv(n, ea, eb)
            try:
                built = lhv.evaluate(constructions.asymmetric_model(n, ea, eb)).beta
            except ChainBellError:
                built = None
            orc: object = None
            if not args.skip_oracle and n <= oracle.MAX_N:
                sol = oracle.solve(oracle.OracleProblem(n, ea, eb, args.mode))
                orc = sol.beta_max if sol.status == oracle.OPTIMAL else sol.status
            rows.append([n, ea, eb, bound, built, orc])
    header = ["N", "eta_a", "eta_b", "beta_bound", "beta_construction", "beta_oracle"]
    if args.out:
        buf = io.StringIO()
        emit_rows(buf, "csv", header, rows, fmt)
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        emit_rows(out, args.format, header, rows, fmt)
    return EXIT_OK


def _add_eta_args(p):
    p.add_argument("--eta", type=float, help="common efficiency of both sides")
    p.add_argument("--eta-a", type=float)
    p.add_argument("--eta-b", type=float)


def _resolve_etas(parser, args):
    if args.eta is not None:
        if args.eta_a is not None or args.eta_b is not None:
            parser.error("give either --eta or --eta-a/--eta-b, not both")
        return
    if args.eta_a is None or args.eta_b is None:
        parser.error("give --eta or both --eta-a and --eta-b")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chainbell", description=__doc__.split("\n")[0])
    parser.add_argument("--digits", type=int, default=8, help="decimal places for printed numbers")
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt_arg(p, default="table"):
        p.add_argument("--format", choices=("table", "csv", "json"), default=default)

    p = sub.add_parser("bounds", help="critical efficiencies per N")
    p.add_argument("--n", type=parse_n_range, required=True, metavar="NMIN..NMAX")
    p.add_argument("--eta-b", type=float, help="efficiency of side B (asymmetric case)")
    p.add_argument("--visibility", type=float, default=1.0)
    fmt_arg(p)
    p.set_defaults(func=cmd_bounds)

    def check_args(p):
        p.add_argument("--visibility", type=float, default=1.0)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--no-independence", action="store_true", help="skip the detection independence check")

    p = sub.add_parser("model", help="build the critical local model")
    p.add_argument("--n", type=int, required=True)
    _add_eta_args(p)
    p.add_argument("--beta-target", type=float)
    p.add_argument("--out", help="write the model JSON here")
    check_args(p)
    fmt_arg(p)
    p.set_defaults(func=cmd_model, needs_eta=True)

    p = sub.add_parser("eval", help="exact statistics of a model file")
    p.add_argument("model")
    check_args(p)
    fmt_arg(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate", help="Monte Carlo run of a model file (JSON report)")
    p.add_argument("model")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, help=f"worker threads (default: ${montecarlo.THREADS_ENV} or 1)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="LP maximum of beta over local models")
    p.add_argument("--n", type=int, required=True)
    _add_eta_args(p)
    p.add_argument("--mode", choices=oracle.MODES, default=oracle.EFFICIENCY_ONLY)
    p.add_argument("--witness", help="write the optimal model JSON here")
    p.add_argument("--lp-tol", type=float, default=1e-9)
    p.add_argument("--orientation", type=int, choices=(1, -1), default=1)
    p.add_argument("--relax-singles", action="store_true")
    fmt_arg(p)
    p.set_defaults(func=cmd_oracle, needs_eta=True)

    p = sub.add_parser("sweep", help="bound vs construction vs oracle over an efficiency grid")
    p.add_argument("--n", type=parse_n_range, required=True, metavar="NMIN..NMAX")
    p.add_argument("--eta", type=parse_grid, required=True, metavar="START:STOP:STEP")
    p.add_argument("--eta-b", type=float, help="hold eta_b fixed (default: eta_b = eta_a)")
    p.add_argument("--mode", choices=oracle.MODES, default=oracle.EFFICIENCY_ONLY)
    p.add_argument("--skip-oracle", action="store_true")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    fmt_arg(p, default="csv")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        # argparse reports usage problems on sys.stderr and help on sys.stdout.
        with contextlib.redirect_stderr(err), contextlib.redirect_stdout(out):
            args = parser.parse_args(argv)
            if getattr(args, "needs_eta", False):
                _resolve_etas(parser, args)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "needs_eta", False):
        if args.eta is not None and args.command == "oracle":
            args.eta_a = args.eta_b = args.eta
    fmt = Formatter(args.digits)
    try:
        return args.func(args, out, fmt)
    except SolverError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_NUMERIC
    except (ChainBellError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
