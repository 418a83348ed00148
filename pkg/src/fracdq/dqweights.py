"""Differential quadrature weights for one fractional term.

Row ``i`` of the weight matrix holds the coefficients that turn nodal values
into the fractional directional derivative at node ``i``. They are fixed by
requiring exactness on the RBF trial space:

* IMQ / GA: ``B w_i = D phi(x_i)`` with ``B[k, j] = phi_k(x_j)``.
* MQ: the constant is added to the trial space, so the first equation forces
  ``sum_j w_ij = 0`` and the rest use ``phi_k - phi_0``.

The coefficient matrix does not depend on ``i``; it is LU-factored once and
the factorization is reused for every node.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, lu_factor, lu_solve
from scipy.linalg.lapack import dgecon

from .fracderiv import check_alpha, frac_deriv_matrix
from .geometry import Direction, Domain, as_direction, boundary_distances
from .nodes import NodeSet
from .quadrature import DEFAULT_POINTS, JacobiRule, gauss_jacobi
from .rbf import RBF, Kernel, kernel_matrix

CONDITION_WARN = 1e12


class SingularSystemError(LinAlgError):
    def __init__(self, message: str, condition_estimate: float = math.inf):
        super().__init__(message)
        self.condition_estimate = condition_estimate


class ConditioningWarning(RuntimeWarning):
    pass


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    alpha: float
    theta: Direction
    entries: np.ndarray

    @property
    def shape(self):
        return self.entries.shape

    def __matmul__(self, other):
        return self.entries @ other


@dataclass(frozen=True)
class CollocationReport:
    condition_estimate: float
    max_residual: float


@dataclass(frozen=True, eq=False)
class Factorization:
    lu: tuple
    condition_estimate: float

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return lu_solve(self.lu, rhs)


def factorize(matrix: np.ndarray, what: str = "collocation matrix") -> Factorization:
    """LU with partial pivoting plus a 1-norm condition estimate."""
    matrix = np.asarray(matrix, dtype=float)
    if not np.all(np.isfinite(matrix)):
        raise SingularSystemError(f"{what} has non-finite entries")
    anorm = float(np.max(np.sum(np.abs(matrix), axis=0)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # scipy warns on exact zero pivots
        lu, piv = lu_factor(matrix, check_finite=False)
    if np.any(np.diag(lu) == 0.0):
        raise SingularSystemError(f"{what} is exactly singular", math.inf)
    rcond, info = dgecon(lu, anorm, norm="1")
    cond = math.inf if rcond == 0.0 else 1.0 / rcond
    if not np.isfinite(cond) or cond > 1.0 / np.finfo(float).eps ** 1.25:
        raise SingularSystemError(
            f"{what} is numerically singular (condition estimate {cond:.3e}); "
            "try a larger shape parameter or check for coincident nodes",
            cond,
        )
    if cond > CONDITION_WARN:
        warnings.warn(
            f"{what} condition estimate {cond:.3e} exceeds {CONDITION_WARN:.0e}",
            ConditioningWarning,
            stacklevel=3,
        )
    return Factorization((lu, piv), cond)


def _relative_residual(A: np.ndarray, W: np.ndarray, rhs: np.ndarray) -> float:
    # rhs columns are per-node right-hand sides; W columns the solutions
    res = np.abs(A @ W - rhs)
    scale = np.max(np.abs(rhs), axis=0)
    scale[scale == 0.0] = 1.0
    return float(np.max(res / scale[None, :]))


def _derivatives(rbf, nodes, d, alpha, domain, rule):
    d = as_direction(d)
    pts = nodes.points
    z = boundary_distances(domain, pts, d) if alpha < 2.0 else np.zeros(len(pts))
    return frac_deriv_matrix(rbf, pts, d, alpha, z, rule)


def _prepare(nodes, alpha, rule):
    alpha = check_alpha(alpha)
    if len(nodes) < 2:
        raise ValueError("need at least two nodes")
    if rule is None:
        rule = gauss_jacobi(alpha, DEFAULT_POINTS)
    return alpha, rule


def weights_imq_ga(
    rbf: RBF,
    nodes: NodeSet,
    d,
    alpha: float,
    domain: Domain,
    rule: JacobiRule | None = None,
) -> tuple[WeightMatrix, CollocationReport]:
    """Weights from the symmetric kernel system (strictly positive definite kernels)."""
    if rbf.kind is Kernel.MQ:
        raise ValueError("use weights_mq for multiquadrics")
    alpha, rule = _prepare(nodes, alpha, rule)
    B = kernel_matrix(rbf, nodes.points)
    fact = factorize(B)
    rhs = _derivatives(rbf, nodes, d, alpha, domain, rule).T  # rhs[k, i]
    W = fact.solve(rhs)
    report = CollocationReport(fact.condition_estimate, _relative_residual(B, W, rhs))
    return WeightMatrix(alpha, as_direction(d), np.ascontiguousarray(W.T)), report


def weights_mq(
    nodes: NodeSet,
    d,
    alpha: float,
    epsilon: float,
    domain: Domain,
    rule: JacobiRule | None = None,
) -> tuple[WeightMatrix, CollocationReport]:
    """Multiquadric weights with the constant in the trial space (rows sum to zero)."""
    rbf = RBF(Kernel.MQ, epsilon)
    alpha, rule = _prepare(nodes, alpha, rule)
    B = kernel_matrix(rbf, nodes.points)
    A = np.empty_like(B)
    A[0] = 1.0
    A[1:] = B[1:] - B[0]
    fact = factorize(A)
    D = _derivatives(rbf, nodes, d, alpha, domain, rule)  # D[i, k]
    rhs = np.empty_like(D.T)
    rhs[0] = 0.0
    rhs[1:] = (D[:, 1:] - D[:, [0]]).T
    W = fact.solve(rhs)
    report = CollocationReport(fact.condition_estimate, _relative_residual(A, W, rhs))
    return WeightMatrix(alpha, as_direction(d), np.ascontiguousarray(W.T)), report


def dq_weights(
    rbf: RBF,
    nodes: NodeSet,
    d,
    alpha: float,
    domain: Domain,
    rule: JacobiRule | None = None,
) -> tuple[WeightMatrix, CollocationReport]:
    """Dispatch to the MQ or IMQ/GA construction."""
    if rbf.kind is Kernel.MQ:
        return weights_mq(nodes, d, alpha, rbf.epsilon, domain, rule)
    return weights_imq_ga(rbf, nodes, d, alpha, domain, rule)


def reconstruction_residual(
    rbf: RBF, nodes: NodeSet, W: WeightMatrix, domain: Domain, rule: JacobiRule | None = None
) -> float:
    """Largest relative error of the weights on the trial functions they must reproduce.

    For IMQ/GA these are the kernels ``phi_k``; for MQ the differences
    ``phi_k - phi_0`` and the constant.
    """
    rule = rule if rule is not None else gauss_jacobi(W.alpha, DEFAULT_POINTS)
    D = _derivatives(rbf, nodes, W.theta, W.alpha, domain, rule)  # D[i, k]
    B = kernel_matrix(rbf, nodes.points)  # B[k, j]
    got = W.entries @ B.T  # got[i, k] = sum_j w_ij phi_k(x_j)
    if rbf.kind is Kernel.MQ:
        got = np.column_stack([W.entries.sum(axis=1), got[:, 1:] - got[:, [0]]])
        want = np.column_stack([np.zeros(len(D)), D[:, 1:] - D[:, [0]]])
    else:
        want = D
    scale = np.max(np.abs(want), axis=1)
    scale[scale == 0.0] = 1.0
    return float(np.max(np.abs(got - want) / scale[:, None]))


def apply(W, samples) -> np.ndarray:
    """DQ approximation ``sum_j w_ij u_j`` for every node ``i``."""
    entries = W.entries if isinstance(W, WeightMatrix) else np.asarray(W, dtype=float)
    samples = np.asarray(samples, dtype=float)
    if samples.shape[0] != entries.shape[1]:
        raise ValueError(f"expected {entries.shape[1]} samples, got {samples.shape[0]}")
    return entries @ samples


def save_weights_csv(W: WeightMatrix, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["i", "j", "weight"])
        n, m = W.entries.shape
        for i in range(n):
            for j in range(m):
                out.writerow([i, j, f"{W.entries[i, j]:.17g}"])


def load_weights_csv(path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    n = max(int(r["i"]) for r in rows) + 1
    m = max(int(r["j"]) for r in rows) + 1
    out = np.zeros((n, m))
    for r in rows:
        out[int(r["i"]), int(r["j"])] = float(r["weight"])
    return out
