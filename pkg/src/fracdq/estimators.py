"""scikit-learn style wrappers around the weight builder and the solver.

``FractionalDQ`` learns a weight matrix from node coordinates and applies it
to nodal samples. ``FractionalDiffusionSolver`` solves a problem on a node set
and interpolates the final state with the same RBF.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .bench.metrics import error_norms, shape_param
from .dqweights import dq_weights, reconstruction_residual
from .geometry import Interval
from .quadrature import DEFAULT_POINTS, gauss_jacobi
from .rbf import RBF, Kernel, kernel_matrix
from .stepper import ProblemSpec, TimeGrid, advance
from .validation import check_nodes, check_points, check_positive, check_samples


def _rbf(kernel, epsilon, c_star, n_nodes) -> RBF:
    if (epsilon is None) == (c_star is None):
        raise ValueError("set exactly one of epsilon and c_star")
    if epsilon is None:
        epsilon = shape_param(check_positive(c_star, "c_star"), n_nodes - 1)
    return RBF(Kernel.parse(kernel), check_positive(epsilon, "epsilon"))


class FractionalDQ(BaseEstimator):
    """DQ weights for ``D^alpha_theta`` on a fixed node set.

    ``fit(X)`` takes node coordinates (or a NodeSet); ``transform(U)`` maps
    rows of nodal samples to rows of approximate derivatives.
    """

    def __init__(self, domain=None, kernel="mq", epsilon=None, c_star=None, alpha=1.5, theta=0.0, quad=DEFAULT_POINTS):
        self.domain = domain
        self.kernel = kernel
        self.epsilon = epsilon
        self.c_star = c_star
        self.alpha = alpha
        self.theta = theta
        self.quad = quad

    def fit(self, X, y=None):
        if self.domain is None:
            raise ValueError("FractionalDQ needs a domain")
        nodes = check_nodes(X, self.domain)
        check_positive(self.quad, "quad", integer=True)
        self.rbf_ = _rbf(self.kernel, self.epsilon, self.c_star, len(nodes))
        rule = gauss_jacobi(self.alpha, self.quad)
        W, report = dq_weights(self.rbf_, nodes, self.theta, self.alpha, self.domain, rule)
        self.nodes_ = nodes
        self.weights_ = W.entries
        self.condition_estimate_ = report.condition_estimate
        self.residual_ = reconstruction_residual(self.rbf_, nodes, W, self.domain, rule)
        self.n_features_in_ = len(nodes)
        return self

    def transform(self, U):
        check_is_fitted(self, "weights_")
        arr, flat = check_samples(U, self.n_features_in_)
        out = arr @ self.weights_.T
        return out[0] if flat else out


class FractionalDiffusionSolver(BaseEstimator):
    """Crank-Nicolson DQ solve of a ``ProblemSpec`` up to its horizon.

    ``fit(X)`` solves ``problem`` on the nodes ``X``; ``predict(P)``
    evaluates the RBF interpolant of the final state at arbitrary points.
    """

    def __init__(self, problem: ProblemSpec | None = None, kernel="mq", epsilon=None, c_star=None, steps=100, quad=DEFAULT_POINTS):
        self.problem = problem
        self.kernel = kernel
        self.epsilon = epsilon
        self.c_star = c_star
        self.steps = steps
        self.quad = quad

    def fit(self, X, y=None):
        if not isinstance(self.problem, ProblemSpec):
            raise ValueError("FractionalDiffusionSolver needs a ProblemSpec")
        check_positive(self.steps, "steps", integer=True)
        check_positive(self.quad, "quad", integer=True)
        problem = self.problem
        nodes = check_nodes(X, problem.domain)
        self.rbf_ = _rbf(self.kernel, self.epsilon, self.c_star, len(nodes))
        weights = [
            dq_weights(self.rbf_, nodes, term.theta, term.alpha, problem.domain, gauss_jacobi(term.alpha, self.quad))[0]
            for term in problem.terms
        ]
        self.report_ = advance(problem, nodes, weights, TimeGrid(int(self.steps), problem.horizon))
        self.nodes_ = nodes
        self.solution_ = self.report_.final_solution
        self._fit_interpolant()
        return self

    def _fit_interpolant(self):
        pts = self.nodes_.points
        B = kernel_matrix(self.rbf_, pts)
        if self.rbf_.kind is Kernel.MQ:
            # constant appended, coefficients constrained to sum to zero
            n = len(pts)
            A = np.zeros((n + 1, n + 1))
            A[:n, :n] = B.T
            A[:n, n] = 1.0
            A[n, :n] = 1.0
            coef = lu_solve(lu_factor(A), np.append(self.solution_, 0.0))
            self.coef_, self.offset_ = coef[:n], coef[n]
        else:
            self.coef_, self.offset_ = lu_solve(lu_factor(B.T), self.solution_), 0.0

    def predict(self, X):
        check_is_fitted(self, "coef_")
        pts = check_points(X)
        if isinstance(self.problem.domain, Interval):
            pts[:, 1] = 0.0
        return self.coef_ @ kernel_matrix(self.rbf_, pts, centers=self.nodes_.points) + self.offset_

    def score(self, X, y):
        """Negative RMS error of the interpolated state against ``y``."""
        e2, _ = error_norms(self.predict(X), np.asarray(y, dtype=float))
        return -e2 if math.isfinite(e2) else -math.inf
