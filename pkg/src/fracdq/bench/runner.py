"""Run catalog cases: build nodes, weights, time-step, and measure errors."""
from __future__ import annotations

import csv
import io
import math
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ..dqweights import dq_weights
from ..geometry import Domain, Interval
from ..nodes import NodeSet, chebyshev_1d, grid_2d, load_nodes, scattered_2d
from ..quadrature import DEFAULT_POINTS, gauss_jacobi
from ..rbf import RBF, Kernel
from ..stepper import SolveReport, TimeGrid, advance
from .catalog import BenchmarkCase, DerivativeCase
from .metrics import conv_rate, error_norms

RESULTS_HEADER = ["case", "rbf", "M", "N", "Q", "epsilon", "e2", "einf", "rate", "wall_ms", "cond"]
DUMP_HEADER = ["x", "y", "exact", "numeric", "abs_err"]

_NODE_SPEC = re.compile(r"^(cheb|grid|scatter):(\d+)(?::seed=(-?\d+))?$")


def fmt(v) -> str:
    """17 significant digits: lossless for doubles."""
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def make_nodes(spec: str, domain: Domain) -> NodeSet:
    """Build nodes from ``cheb:M``, ``grid:COUNT``, ``scatter:COUNT[:seed=S]`` or a file path."""
    m = _NODE_SPEC.match(spec.strip())
    if m is None:
        path = Path(spec)
        if not path.exists():
            raise ValueError(f"node spec {spec!r} is neither a generator nor an existing file")
        return load_nodes(path, domain)
    kind, count, seed = m.group(1), int(m.group(2)), m.group(3)
    if kind == "cheb":
        if not isinstance(domain, Interval):
            raise ValueError("cheb nodes need a 1D interval domain")
        if seed is not None:
            raise ValueError("cheb nodes take no seed")
        return chebyshev_1d(domain.a, domain.b, count)
    if isinstance(domain, Interval):
        raise ValueError(f"{kind} nodes need a 2D domain")
    if kind == "grid":
        if seed is not None:
            raise ValueError("grid nodes take no seed")
        return grid_2d(domain, count)
    return scattered_2d(domain, count, int(seed) if seed is not None else 1)


def default_node_spec(case: BenchmarkCase, M: int) -> str:
    d = case.default_config
    if d.nodes == "cheb":
        return f"cheb:{M}"
    if d.nodes == "grid":
        return f"grid:{M + 1}"
    if d.nodes == "scatter":
        return f"scatter:{M + 1}:seed={d.seed}"
    if d.nodes:
        return d.nodes
    raise ValueError(f"case {case.name} has no default node set; pass one explicitly")


def default_epsilon(case: BenchmarkCase, kind: Kernel, M: int) -> float:
    try:
        rule = case.default_config.shapes[kind]
    except KeyError:
        raise KeyError(f"case {case.name} has no default shape parameter for {kind.value}") from None
    return rule.resolve(M)


@dataclass
class CaseResult:
    case: str
    rbf: str
    M: int
    N: Optional[int]
    Q: int
    epsilon: float
    e2: float
    einf: float
    rate: Optional[float] = None
    wall_ms: Optional[float] = None
    cond: float = math.nan
    numeric: Optional[np.ndarray] = None
    exact: Optional[np.ndarray] = None
    points: Optional[np.ndarray] = None
    report: Optional[SolveReport] = None

    def row(self, timing: bool = False) -> list[str]:
        return [
            self.case,
            self.rbf,
            fmt(self.M),
            fmt(self.N),
            fmt(self.Q),
            fmt(self.epsilon),
            fmt(self.e2),
            fmt(self.einf),
            fmt(self.rate),
            fmt(self.wall_ms) if timing else "",
            fmt(self.cond),
        ]


def run_derivative_case(case, rbf: RBF, M: int, Q: int = DEFAULT_POINTS) -> tuple[float, float]:
    """Errors of the DQ approximation of the case's derivative on Chebyshev nodes."""
    e2, einf, _ = _derivative_errors(case, rbf, chebyshev_1d(_dcase(case).interval.a, _dcase(case).interval.b, M), Q)
    return e2, einf


def _dcase(case) -> DerivativeCase:
    return case.problem if isinstance(case, BenchmarkCase) else case


def _derivative_errors(case, rbf, nodes, Q):
    dc = _dcase(case)
    W, rep = dq_weights(rbf, nodes, dc.theta, dc.alpha, dc.interval, gauss_jacobi(dc.alpha, Q))
    x = nodes.x
    numeric = W.entries @ dc.u(x)
    exact = dc.exact(x)
    e2, einf = error_norms(numeric, exact)
    return e2, einf, (numeric, exact, rep)


def run_pde_case(
    case: BenchmarkCase,
    rbf,
    nodes: NodeSet,
    N: int,
    Q: int = DEFAULT_POINTS,
    epsilon: Optional[float] = None,
    snapshot_stride: Optional[int] = None,
) -> tuple[float, float, SolveReport]:
    """Solve the case to its horizon and return ``(e2, einf, report)``.

    ``rbf`` is an :class:`RBF` or a bare kernel kind; with a bare kind the
    shape parameter comes from ``epsilon`` or the case defaults.
    """
    rbf = _resolve_rbf(case, rbf, len(nodes) - 1, epsilon)
    report, _ = _solve(case, rbf, nodes, N, Q, snapshot_stride)
    T = case.problem.horizon
    exact = case.exact(nodes.x, nodes.y, T)
    e2, einf = error_norms(report.final_solution, exact)
    return e2, einf, report


def _resolve_rbf(case, rbf, M, epsilon) -> RBF:
    if isinstance(rbf, RBF):
        return rbf if epsilon is None else RBF(rbf.kind, epsilon)
    kind = Kernel.parse(rbf)
    return RBF(kind, epsilon if epsilon is not None else default_epsilon(case, kind, M))


def _solve(case, rbf, nodes, N, Q, snapshot_stride=None):
    problem = case.problem
    weights, conds = [], []
    for term in problem.terms:
        W, rep = dq_weights(rbf, nodes, term.theta, term.alpha, problem.domain, gauss_jacobi(term.alpha, Q))
        weights.append(W)
        conds.append(rep.condition_estimate)
    report = advance(problem, nodes, weights, TimeGrid(N, problem.horizon), snapshot_stride)
    return report, max(conds)


def solve_case(
    case: BenchmarkCase,
    kind,
    M: Optional[int] = None,
    *,
    nodes: Optional[NodeSet] = None,
    node_spec: Optional[str] = None,
    epsilon: Optional[float] = None,
    c_star: Optional[float] = None,
    steps: Optional[int] = None,
    quad: int = DEFAULT_POINTS,
    snapshot_stride: Optional[int] = None,
) -> CaseResult:
    """One benchmark run with catalog defaults filled in; returns a result row."""
    kind = Kernel.parse(kind)
    if epsilon is not None and c_star is not None:
        raise ValueError("give either epsilon or c_star, not both")
    if nodes is None:
        if node_spec is None:
            if M is None and case.default_config.nodes in ("", "cheb", "grid", "scatter"):
                raise ValueError("need M, nodes or a node spec")
            node_spec = default_node_spec(case, M)
        nodes = make_nodes(node_spec, case.domain)
    M_actual = len(nodes) - 1
    if epsilon is None:
        epsilon = c_star / (M_actual + 1) ** 0.25 if c_star is not None else default_epsilon(case, kind, M_actual)
    rbf = RBF(kind, epsilon)

    start = time.perf_counter()
    if case.is_derivative:
        e2, einf, (numeric, exact, rep) = _derivative_errors(case, rbf, nodes, quad)
        N, cond, report = None, rep.condition_estimate, None
    else:
        if steps is None:
            if case.default_config.steps is None:
                raise ValueError(f"case {case.name} needs an explicit number of steps")
            steps = case.default_config.steps(M_actual)
        N = steps
        report, cond = _solve(case, rbf, nodes, N, quad, snapshot_stride)
        numeric = report.final_solution
        if case.exact is None:
            exact = np.full_like(numeric, math.nan)
            e2 = einf = math.nan
        else:
            exact = case.exact(nodes.x, nodes.y, case.problem.horizon)
            e2, einf = error_norms(numeric, exact)
    wall_ms = 1e3 * (time.perf_counter() - start)
    return CaseResult(
        case=case.name,
        rbf=kind.value,
        M=M_actual,
        N=N,
        Q=quad,
        epsilon=epsilon,
        e2=e2,
        einf=einf,
        wall_ms=wall_ms,
        cond=cond,
        numeric=numeric,
        exact=exact,
        points=nodes.points,
        report=report,
    )


def attach_rates(results: Sequence[CaseResult], dim: int, norm: str = "einf") -> None:
    """Fill ``rate`` of every row after the first from its predecessor."""
    for prev, cur in zip(results, results[1:]):
        e_prev, e_cur = getattr(prev, norm), getattr(cur, norm)
        if math.isfinite(e_prev) and math.isfinite(e_cur) and e_prev > 0 and e_cur > 0 and prev.M != cur.M:
            cur.rate = conv_rate(e_prev, e_cur, prev.M, cur.M, dim)


def results_csv(results: Sequence[CaseResult], timing: bool = False) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(RESULTS_HEADER)
    for r in results:
        out.writerow(r.row(timing))
    return buf.getvalue()


def write_results(results: Sequence[CaseResult], path, timing: bool = False) -> None:
    Path(path).write_text(results_csv(results, timing), encoding="utf-8")


def read_results(path) -> list[dict]:
    """Parse a results CSV back into typed dictionaries."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for r in csv.DictReader(fh):
            parsed = {"case": r["case"], "rbf": r["rbf"]}
            for key in ("M", "N", "Q"):
                parsed[key] = int(r[key]) if r[key] else None
            for key in ("epsilon", "e2", "einf", "rate", "wall_ms", "cond"):
                parsed[key] = float(r[key]) if r[key] else None
            rows.append(parsed)
    return rows


def write_solution_dump(result: CaseResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(DUMP_HEADER)
        for (x, y), ex, nu in zip(result.points, result.exact, result.numeric):
            out.writerow([fmt(x), fmt(y), fmt(ex), fmt(nu), fmt(abs(ex - nu))])
