"""Gauss-Jacobi rules for the weight ``(1 + s)^(1 - alpha)`` on ``[-1, 1]``.

Nodes and weights come from the symmetric tridiagonal Jacobi matrix of the
monic Jacobi polynomials ``P^(0, 1-alpha)`` (Golub-Welsch): nodes are its
eigenvalues, weights are ``mu0`` times the squared first eigenvector
components.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

DEFAULT_POINTS = 50


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class JacobiRule:
    alpha: float
    q: int
    points: np.ndarray
    weights: np.ndarray

    @property
    def exponent(self) -> float:
        """Exponent of ``(1 + s)`` in the weight function."""
        return 0.0 if self.alpha == 2.0 else 1.0 - self.alpha

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def zeroth_moment(a: float, b: float) -> float:
    """Integral of ``(1 - s)^a (1 + s)^b`` over ``[-1, 1]``."""
    return math.exp(
        (a + b + 1.0) * math.log(2.0)
        + math.lgamma(a + 1.0)
        + math.lgamma(b + 1.0)
        - math.lgamma(a + b + 2.0)
    )


def jacobi_recurrence(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the ``n x n`` Jacobi matrix for ``P^(a, b)``."""
    k = np.arange(n, dtype=float)
    s = 2.0 * k + a + b
    diag = np.empty(n)
    with np.errstate(divide="ignore", invalid="ignore"):
        diag[:] = (b * b - a * a) / (s * (s + 2.0))
    diag[0] = (b - a) / (a + b + 2.0)
    k = np.arange(1, n, dtype=float)
    s = 2.0 * k + a + b
    beta = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0))
    if n > 1 and abs(a + b + 1.0) < 1e-300:
        # s - 1 = 0 for k = 1 when a + b = -1; use the limit
        beta[0] = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) ** 2 * (3.0 + a + b))
    return diag, np.sqrt(beta)


def golub_welsch(a: float, b: float, q: int) -> tuple[np.ndarray, np.ndarray]:
    diag, off = jacobi_recurrence(a, b, q)
    if q == 1:
        return diag.copy(), np.array([zeroth_moment(a, b)])
    nodes, vecs = eigh_tridiagonal(diag, off)
    weights = zeroth_moment(a, b) * vecs[0, :] ** 2
    return nodes, weights


@functools.lru_cache(maxsize=64)
def _cached_rule(alpha: float, q: int) -> JacobiRule:
    b = 0.0 if alpha == 2.0 else 1.0 - alpha
    nodes, weights = golub_welsch(0.0, b, q)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return JacobiRule(alpha=alpha, q=q, points=nodes, weights=weights)


def gauss_jacobi(alpha: float, q: int = DEFAULT_POINTS) -> JacobiRule:
    """The ``q``-point rule for the fractional order ``alpha`` in ``(1, 2]``.

    For ``alpha < 2`` the weight is ``(1 + s)^(1 - alpha)``, which absorbs the
    singular kernel of the Caputo integral after mapping ``[0, z]`` onto
    ``[-1, 1]``. At ``alpha = 2`` the operator is local and the rule
    degenerates to Gauss-Legendre.
    """
    alpha = float(alpha)
    if not (1.0 < alpha <= 2.0):
        raise QuadratureError(f"alpha must lie in (1, 2], got {alpha}")
    if int(q) != q or q < 1:
        raise QuadratureError(f"q must be a positive integer, got {q}")
    return _cached_rule(alpha, int(q))
