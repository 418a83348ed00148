"""Command-line front end.

    fracdq run --case ex52 --rbf mq --eps 0.1875 --nodes cheb:15 --steps 15
    fracdq convergence --case ex52 --rbf mq --M 15 20 25 30
    fracdq weights --nodes cheb:10 --rbf mq --eps 0.3112 --alpha 1.2 --theta pi --out w.csv

Exit status: 0 on success, 1 on configuration errors, 2 when a linear system
is numerically singular.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .bench.catalog import CATALOG, get_case
from .bench.runner import attach_rates, make_nodes, results_csv, solve_case, write_solution_dump
from .config import ConfigError, load_problem
from .dqweights import ConditioningWarning, SingularSystemError, dq_weights, reconstruction_residual, save_weights_csv
from .expr import ExpressionError, evaluate_constant
from .geometry import GeometryError, Interval, parse_domain
from .nodes import NodeSetError
from .quadrature import DEFAULT_POINTS, QuadratureError, gauss_jacobi
from .rbf import RBF, Kernel

EXIT_CONFIG = 1
EXIT_SINGULAR = 2
CONFIG_ERRORS = (ConfigError, GeometryError, NodeSetError, ExpressionError, QuadratureError, KeyError, ValueError, OSError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class _Once(argparse.Action):
    """Store a value, refusing a second occurrence of the same flag."""

    def __call__(self, parser, namespace, values, option_string=None):
        if getattr(namespace, "_seen", None) is None:
            namespace._seen = set()
        if self.dest in namespace._seen:
            raise UsageError(f"{option_string} given more than once")
        namespace._seen.add(self.dest)
        setattr(namespace, self.dest, values)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _constant(text: str) -> float:
    try:
        return evaluate_constant(text)
    except (ExpressionError, SyntaxError):
        raise argparse.ArgumentTypeError(f"cannot evaluate {text!r}") from None


def _m_list(values) -> list[int]:
    out = []
    for v in values:
        out.extend(_positive_int(p) for p in str(v).split(",") if p)
    return out


def _shape_flags(p, rbf_default="the case's"):
    p.add_argument("--rbf", action=_Once, help=f"kernel: mq, imq or ga (default: {rbf_default})")
    p.add_argument("--eps", action=_Once, type=_positive_float, help="shape parameter")
    p.add_argument("--cstar", action=_Once, type=_positive_float, help="2D rule eps = c*/(M+1)^0.25")
    p.add_argument("--quad", action=_Once, type=_positive_int, default=DEFAULT_POINTS, help="Gauss-Jacobi points")


def _case_flags(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--case", action=_Once, choices=sorted(CATALOG), help="catalog case")
    src.add_argument("--problem", action=_Once, help="YAML problem file")
    p.add_argument("--alpha", action=_Once, type=_constant, help="override the case's fractional order")
    p.add_argument("--steps", action=_Once, type=_positive_int, help="time steps N")
    p.add_argument("--out", action=_Once, help="results CSV (default: standard output)")
    p.add_argument("--timing", action="store_true", help="fill the wall_ms column")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fracdq", description="RBF differential quadrature for fractional diffusion")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run one benchmark or custom problem")
    _case_flags(run)
    _shape_flags(run)
    run.add_argument("--nodes", action=_Once, help="cheb:M, grid:COUNT, scatter:COUNT[:seed=S] or a node file")
    run.add_argument("--M", action=_Once, type=_positive_int, dest="M", help="nodal parameter (nodes = M+1)")
    run.add_argument("--dump", action=_Once, help="write x,y,exact,numeric,abs_err per node")
    run.add_argument("--snapshot-stride", action=_Once, type=_positive_int, help="keep every k-th time level")

    conv = sub.add_parser("convergence", help="run a case over several M and report rates")
    _case_flags(conv)
    _shape_flags(conv)
    conv.add_argument("--M", action=_Once, nargs="+", dest="M", required=True, help="M values (space or comma separated)")
    conv.add_argument("--seed", action=_Once, type=int, help="seed for scattered node sets")

    wts = sub.add_parser("weights", help="dump a DQ weight matrix")
    _shape_flags(wts, rbf_default="mq")
    wts.add_argument("--nodes", action=_Once, required=True, help="node spec or file")
    wts.add_argument("--domain", action=_Once, help="square, interval:a:b, circle:cx:cy:r, polygon:... (default by node kind)")
    wts.add_argument("--alpha", action=_Once, type=_constant, required=True, help="fractional order in (1, 2]")
    wts.add_argument("--theta", action=_Once, type=_constant, default=0.0, help="direction angle, e.g. pi/4")
    wts.add_argument("--out", action=_Once, help="weight CSV i,j,weight")
    return parser


def _load_case(args):
    if args.problem is not None:
        if args.alpha is not None:
            raise UsageError("--alpha applies to catalog cases only")
        return load_problem(args.problem)
    return get_case(args.case, alpha=args.alpha)


def _kind(args, case) -> Kernel:
    return Kernel.parse(args.rbf) if args.rbf is not None else case.default_config.kind


def _check_shape(args):
    if args.eps is not None and args.cstar is not None:
        raise UsageError("give either --eps or --cstar, not both")


def _emit(results, args) -> None:
    text = results_csv(results, timing=args.timing)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    for r in results:
        line = f"{r.case} {r.rbf} M={r.M} eps={r.epsilon:.6g} e2={r.e2:.4e} einf={r.einf:.4e} cond={r.cond:.2e}"
        if r.rate is not None:
            line += f" rate={r.rate:.4f}"
        print(line)
    if not args.out:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    _check_shape(args)
    case = _load_case(args)
    if args.nodes is not None and args.M is not None:
        raise UsageError("give either --nodes or --M, not both")
    M = args.M
    if args.nodes is None and M is None and not (case.default_config.nodes and case.default_config.nodes not in ("cheb", "grid", "scatter")):
        if not case.default_config.m_values:
            raise UsageError("no default node set; pass --nodes or --M")
        M = case.default_config.m_values[0]
    result = solve_case(
        case,
        _kind(args, case),
        M,
        node_spec=args.nodes,
        epsilon=args.eps,
        c_star=args.cstar,
        steps=args.steps,
        quad=args.quad,
        snapshot_stride=args.snapshot_stride,
    )
    _emit([result], args)
    if args.dump:
        write_solution_dump(result, args.dump)
    return 0


def _workers() -> int:
    raw = os.environ.get("FRACDQ_THREADS")
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise UsageError(f"FRACDQ_THREADS must be an integer, got {raw!r}") from None
        if n < 1:
            raise UsageError("FRACDQ_THREADS must be at least 1")
        return n
    return os.cpu_count() or 1


def cmd_convergence(args) -> int:
    _check_shape(args)
    case = _load_case(args)
    m_values = _m_list(args.M)
    if len(m_values) < 2:
        raise UsageError("convergence needs at least two values of --M")
    if len(set(m_values)) != len(m_values):
        raise UsageError("--M values must be distinct")
    kinds = [Kernel.parse(k) for k in args.rbf.split(",")] if args.rbf else [case.default_config.kind]
    seed = args.seed if args.seed is not None else case.default_config.seed
    node_kind = case.default_config.nodes

    def spec(M):
        if node_kind == "cheb":
            return f"cheb:{M}"
        if node_kind == "grid":
            return f"grid:{M + 1}"
        if node_kind == "scatter":
            return f"scatter:{M + 1}:seed={seed}"
        raise UsageError("convergence needs a case with a generated node family")

    jobs = [(k, M) for k in kinds for M in m_values]
    specs = {M: spec(M) for M in m_values}

    def one(job):
        k, M = job
        return solve_case(case, k, M, node_spec=specs[M], epsilon=args.eps, c_star=args.cstar, steps=args.steps, quad=args.quad)

    with ThreadPoolExecutor(max_workers=min(_workers(), len(jobs))) as pool:
        results = list(pool.map(one, jobs))
    ordered = []
    for k in kinds:
        block = [r for r in results if r.rbf == k.value]
        attach_rates(block, case.dim)
        ordered.extend(block)
    _emit(ordered, args)
    return 0


def cmd_weights(args) -> int:
    _check_shape(args)
    if args.eps is None and args.cstar is None:
        raise UsageError("weights needs --eps or --cstar")
    domain_text = args.domain or ("interval:0:1" if args.nodes.startswith("cheb:") else "square")
    domain = parse_domain(domain_text)
    nodes = make_nodes(args.nodes, domain)
    kind = Kernel.parse(args.rbf or "mq")
    eps = args.eps if args.eps is not None else args.cstar / len(nodes) ** 0.25
    rbf = RBF(kind, eps)
    if isinstance(domain, Interval) and args.theta not in (0.0, math.pi):
        raise UsageError("1D domains only allow theta = 0 or pi")
    rule = gauss_jacobi(args.alpha, args.quad)
    W, report = dq_weights(rbf, nodes, args.theta, args.alpha, domain, rule)
    residual = reconstruction_residual(rbf, nodes, W, domain, rule)
    if args.out:
        save_weights_csv(W, args.out)
    print(f"nodes: {len(nodes)}")
    print(f"condition estimate: {report.condition_estimate:.6e}")
    print(f"max reconstruction residual: {residual:.6e}")
    if kind is Kernel.MQ:
        rows = np.abs(W.entries.sum(axis=1)).max() / np.abs(W.entries).max()
        print(f"max relative row sum: {rows:.6e}")
    return 0


COMMANDS = {"run": cmd_run, "convergence": cmd_convergence, "weights": cmd_weights}


def _show_warning(message, category, filename, lineno, file=None, line=None):
    label = "warning" if issubclass(category, ConditioningWarning) else category.__name__
    print(f"{label}: {message}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    with warnings.catch_warnings():
        warnings.showwarning = _show_warning
        warnings.simplefilter("default", ConditioningWarning)
        try:
            args = parser.parse_args(argv)
            return COMMANDS[args.command](args)
        except UsageError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except SingularSystemError as exc:
            print(f"numerical failure: {exc}", file=sys.stderr)
            print(f"condition estimate: {exc.condition_estimate:.6e}", file=sys.stderr)
            return EXIT_SINGULAR
        except CONFIG_ERRORS as exc:
            msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
            print(f"error: {msg}", file=sys.stderr)
            return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
