"""Caputo fractional directional derivatives of RBF kernels.

For ``1 < alpha < 2`` the derivative at a node is

    1/Gamma(2-alpha) * int_0^z w^(1-alpha) D2_theta phi(x - w u) dw,

``u = (cos theta, sin theta)``, ``z`` the back-distance to the boundary.
Mapping ``w = z (1 + s) / 2`` turns it into a Gauss-Jacobi sum with weight
``(1 + s)^(1 - alpha)``.
"""
from __future__ import annotations

import math

import numpy as np

from .geometry import Domain, as_direction, as_point, boundary_distances
from .quadrature import JacobiRule
from .rbf import RBF

# orders in (2 - ALPHA_GAP, 2) are rejected: 1/Gamma(2 - alpha) blows up
ALPHA_GAP = 1e-8
# caps the (nodes x Q x centers) work array per block
_BLOCK_ELEMENTS = 2_000_000


class FractionalOrderError(ValueError):
    pass


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (1.0 < alpha <= 2.0):
        raise FractionalOrderError(f"alpha must lie in (1, 2], got {alpha}")
    if 2.0 - ALPHA_GAP < alpha < 2.0:
        raise FractionalOrderError(f"alpha={alpha!r} is too close to 2; use alpha=2 exactly")
    return alpha


def _check_rule(rule: JacobiRule, alpha: float) -> None:
    if rule.alpha != alpha:
        raise FractionalOrderError(f"quadrature rule built for alpha={rule.alpha}, not {alpha}")


def frac_dir_deriv(rbf: RBF, center, node, d, alpha: float, z: float, rule: JacobiRule) -> float:
    """Caputo derivative of order ``alpha`` along ``d`` of the kernel at ``center``."""
    alpha = check_alpha(alpha)
    _check_rule(rule, alpha)
    d = as_direction(d)
    c, p = as_point(center), as_point(node)
    if alpha == 2.0:
        return float(rbf.dir2(p.x - c.x, p.y - c.y, d.cos_theta, d.sin_theta))
    if z < 0.0:
        raise ValueError(f"boundary distance must be nonnegative, got {z}")
    if z == 0.0:
        return 0.0
    w = 0.5 * z * (1.0 + rule.points)
    vals = rbf.dir2(p.x - d.cos_theta * w - c.x, p.y - d.sin_theta * w - c.y, d.cos_theta, d.sin_theta)
    return (0.5 * z) ** (2.0 - alpha) / math.gamma(2.0 - alpha) * float(np.dot(rule.weights, vals))


def frac_deriv_matrix(
    rbf: RBF,
    points: np.ndarray,
    d,
    alpha: float,
    z: np.ndarray,
    rule: JacobiRule,
    centers: np.ndarray | None = None,
) -> np.ndarray:
    """``D[i, k]``: derivative of the kernel centred at ``centers[k]`` at ``points[i]``.

    ``z[i]`` is the back-distance of ``points[i]``; rows with ``z = 0`` are
    zero for ``alpha < 2``.
    """
    alpha = check_alpha(alpha)
    _check_rule(rule, alpha)
    d = as_direction(d)
    points = np.asarray(points, dtype=float)
    centers = points if centers is None else np.asarray(centers, dtype=float)
    z = np.asarray(z, dtype=float)
    c, s = d.cos_theta, d.sin_theta
    n, m = len(points), len(centers)

    if alpha == 2.0:
        rx = points[:, None, 0] - centers[None, :, 0]
        ry = points[:, None, 1] - centers[None, :, 1]
        return rbf.dir2(rx, ry, c, s)

    if np.any(z < 0.0):
        raise ValueError("boundary distances must be nonnegative")
    out = np.empty((n, m))
    w = 0.5 * z[:, None] * (1.0 + rule.points[None, :])  # (n, Q)
    qx = points[:, 0, None] - c * w
    qy = points[:, 1, None] - s * w
    block = max(1, _BLOCK_ELEMENTS // max(1, rule.q * m))
    for start in range(0, n, block):
        sl = slice(start, start + block)
        rx = qx[sl, :, None] - centers[None, None, :, 0]
        ry = qy[sl, :, None] - centers[None, None, :, 1]
        out[sl] = np.einsum("s,isk->ik", rule.weights, rbf.dir2(rx, ry, c, s))
    scale = (0.5 * z) ** (2.0 - alpha) / math.gamma(2.0 - alpha)
    return out * scale[:, None]


def frac_deriv_vector(
    rbf: RBF, centers, node_index: int, d, alpha: float, domain: Domain, rule: JacobiRule
) -> np.ndarray:
    """Derivatives of every kernel at one node, ``z`` computed once for the node."""
    pts = centers.points if hasattr(centers, "points") else np.asarray(centers, dtype=float)
    if not 0 <= node_index < len(pts):
        raise IndexError(f"node_index {node_index} out of range for {len(pts)} nodes")
    node = pts[node_index : node_index + 1]
    d = as_direction(d)
    z = boundary_distances(domain, node, d) if check_alpha(alpha) < 2.0 else np.zeros(1)
    return frac_deriv_matrix(rbf, node, d, alpha, z, rule, centers=pts)[0]

