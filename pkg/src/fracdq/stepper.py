"""Crank-Nicolson time stepping of the semi-discrete DQ system.

Only interior nodes are unknowns. Boundary values are assigned from the
boundary data at every level and enter the interior equations through the
interior-by-boundary blocks of the weight matrices.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dqweights import Factorization, SingularSystemError, WeightMatrix, factorize
from .fracderiv import check_alpha
from .geometry import Direction, Domain, as_direction
from .nodes import NodeSet

SpaceFn = Callable[[np.ndarray, np.ndarray], np.ndarray]
SpaceTimeFn = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class FractionalTerm:
    """One ``kappa(x, y) * D^alpha_theta u`` term of the operator."""

    alpha: float
    theta: Direction
    kappa: SpaceFn

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        object.__setattr__(self, "theta", as_direction(self.theta))


@dataclass(frozen=True)
class ProblemSpec:
    """``u_t - sum_l kappa_l D^alpha_l u = f`` with initial and boundary data."""

    domain: Domain
    terms: tuple
    source: SpaceTimeFn
    initial: SpaceFn
    boundary: SpaceTimeFn
    horizon: float

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("a problem needs at least one fractional term")
        if not (math.isfinite(self.horizon) and self.horizon > 0.0):
            raise ValueError(f"horizon must be positive, got {self.horizon}")


@dataclass(frozen=True)
class TimeGrid:
    n_steps: int
    horizon: float

    def __post_init__(self):
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValueError(f"n_steps must be a positive integer, got {self.n_steps}")
        if not self.horizon > 0.0:
            raise ValueError("horizon must be positive")

    @property
    def tau(self) -> float:
        return self.horizon / self.n_steps

    def time(self, n: int) -> float:
        # t_N lands exactly on the horizon
        return self.horizon if n == self.n_steps else n * self.tau


@dataclass
class SolveReport:
    final_solution: np.ndarray
    snapshots: list = field(default_factory=list)
    wall_time: float = 0.0
    condition_estimate: float = 1.0


@dataclass(frozen=True, eq=False)
class CrankNicolsonSystem:
    """``left = I - tau/2 S``, ``right = I + tau/2 S`` on the interior nodes.

    ``S = sum_l diag(kappa_l) K_l``; ``boundary_blocks[l]`` is the
    interior-by-boundary block ``G_l`` of ``W_l`` and ``coupling`` is
    ``sum_l diag(kappa_l) G_l``.
    """

    left: np.ndarray
    right: np.ndarray
    boundary_blocks: tuple
    kappas: tuple
    coupling: np.ndarray
    tau: float


def _kappa_at(term: FractionalTerm, pts: np.ndarray) -> np.ndarray:
    vals = np.broadcast_to(np.asarray(term.kappa(pts[:, 0], pts[:, 1]), dtype=float), (len(pts),))
    return np.array(vals)


def build_system(
    problem: ProblemSpec, nodes: NodeSet, weights: Sequence[WeightMatrix], grid: TimeGrid
) -> CrankNicolsonSystem:
    if len(weights) != len(problem.terms):
        raise ValueError(f"{len(problem.terms)} terms but {len(weights)} weight matrices")
    n = len(nodes)
    inner, bnd = nodes.interior_idx, nodes.boundary_idx
    pts = nodes.points[inner]
    S = np.zeros((len(inner), len(inner)))
    coupling = np.zeros((len(inner), len(bnd)))
    blocks, kappas = [], []
    any_positive = False
    for term, W in zip(problem.terms, weights):
        if W.entries.shape != (n, n):
            raise ValueError(f"weight matrix shape {W.entries.shape} does not match {n} nodes")
        if W.alpha != term.alpha or W.theta.theta != term.theta.theta:
            raise ValueError("weight matrix order/direction does not match its term")
        kap = _kappa_at(term, pts)
        if np.any(kap < 0.0) or not np.all(np.isfinite(kap)):
            raise ValueError("diffusivity must be finite and nonnegative at the nodes")
        any_positive |= bool(np.any(kap > 0.0))
        K = W.entries[np.ix_(inner, inner)]
        G = W.entries[np.ix_(inner, bnd)]
        S += kap[:, None] * K
        coupling += kap[:, None] * G
        blocks.append(G)
        kappas.append(kap)
    if not any_positive:
        raise ValueError("all diffusivities vanish at the interior nodes")
    half = 0.5 * grid.tau
    eye = np.eye(len(inner))
    return CrankNicolsonSystem(
        left=eye - half * S,
        right=eye + half * S,
        boundary_blocks=tuple(blocks),
        kappas=tuple(kappas),
        coupling=coupling,
        tau=grid.tau,
    )


def _eval(fn, x, y, *t) -> np.ndarray:
    return np.broadcast_to(np.asarray(fn(x, y, *t), dtype=float), x.shape).copy()


def advance(
    problem: ProblemSpec,
    nodes: NodeSet,
    weights: Sequence[WeightMatrix],
    grid: TimeGrid,
    snapshot_stride: int | None = None,
) -> SolveReport:
    """March from ``t = 0`` to the horizon; returns the nodal solution at ``T``.

    Each step solves ``left U^n = right U^(n-1) + tau H`` with the source at
    the half level and the boundary data averaged over both levels.
    """
    start = time.perf_counter()
    system = build_system(problem, nodes, weights, grid)
    inner, bnd = nodes.interior_idx, nodes.boundary_idx
    x, y = nodes.x, nodes.y
    xi, yi = x[inner], y[inner]
    xb, yb = x[bnd], y[bnd]
    tau = grid.tau

    try:
        fact: Factorization = factorize(system.left, "Crank-Nicolson matrix")
    except SingularSystemError as exc:
        raise SingularSystemError(
            f"{exc}; try a smaller time step or a different shape parameter",
            exc.condition_estimate,
        ) from exc

    U = _eval(problem.initial, x, y)
    snapshots = []
    if snapshot_stride:
        snapshots.append((0.0, U.copy()))
    g_prev = _eval(problem.boundary, xb, yb, 0.0)
    for n in range(1, grid.n_steps + 1):
        t = grid.time(n)
        g_now = _eval(problem.boundary, xb, yb, t)
        H = _eval(problem.source, xi, yi, t - 0.5 * tau)
        if len(bnd):
            H += 0.5 * (system.coupling @ (g_now + g_prev))
        U_inner = fact.solve(system.right @ U[inner] + tau * H)
        U[inner] = U_inner
        U[bnd] = g_now
        g_prev = g_now
        if snapshot_stride and n % snapshot_stride == 0:
            snapshots.append((t, U.copy()))
    return SolveReport(
        final_solution=U,
        snapshots=snapshots,
        wall_time=time.perf_counter() - start,
        condition_estimate=fact.condition_estimate,
    )
