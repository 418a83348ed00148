"""Multiquadric, inverse multiquadric and Gaussian kernels.

All functions take coordinate offsets ``rx = x - x_k``, ``ry = y - y_k``
and broadcast over numpy arrays.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .geometry import Direction, as_direction, as_point


class Kernel(str, enum.Enum):
    MQ = "mq"
    IMQ = "imq"
    GA = "ga"

    @classmethod
    def parse(cls, value) -> "Kernel":
        if isinstance(value, Kernel):
            return value
        key = str(value).strip().lower()
        aliases = {"multiquadric": "mq", "inverse_multiquadric": "imq", "im": "imq", "gaussian": "ga"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown RBF kind {value!r}; expected mq, imq or ga") from None


@dataclass(frozen=True)
class RBF:
    kind: Kernel
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "kind", Kernel.parse(self.kind))
        eps = float(self.epsilon)
        if not (math.isfinite(eps) and eps > 0.0):
            raise ValueError(f"shape parameter must be positive, got {self.epsilon}")
        object.__setattr__(self, "epsilon", eps)

    def value(self, rx, ry):
        r2 = rx * rx + ry * ry
        e2 = self.epsilon**2
        if self.kind is Kernel.MQ:
            return np.sqrt(r2 + e2)
        if self.kind is Kernel.IMQ:
            return 1.0 / np.sqrt(r2 + e2)
        return np.exp(-e2 * r2)

    def dir2(self, rx, ry, cos_t: float, sin_t: float):
        """Second derivative along ``(cos_t, sin_t)`` at offset ``(rx, ry)``."""
        e2 = self.epsilon**2
        r2 = rx * rx + ry * ry
        proj = cos_t * rx + sin_t * ry
        if self.kind is Kernel.MQ:
            # Hessian of sqrt(r^2 + e^2) contracted with the unit direction
            q = r2 + e2
            return (e2 + r2 - proj * proj) / (q * np.sqrt(q))
        if self.kind is Kernel.IMQ:
            q = r2 + e2
            sq = np.sqrt(q)
            return 3.0 * proj * proj / (q * q * sq) - 1.0 / (q * sq)
        return 2.0 * e2 * np.exp(-e2 * r2) * (2.0 * e2 * proj * proj - 1.0)


def evaluate(rbf: RBF, center, p) -> float:
    c, p = as_point(center), as_point(p)
    return float(rbf.value(p.x - c.x, p.y - c.y))


def dir2(rbf: RBF, center, p, d) -> float:
    c, p = as_point(center), as_point(p)
    d: Direction = as_direction(d)
    return float(rbf.dir2(p.x - c.x, p.y - c.y, d.cos_theta, d.sin_theta))


def kernel_matrix(rbf: RBF, points: np.ndarray, centers: np.ndarray | None = None) -> np.ndarray:
    """``K[k, j] = phi_k(points[j])`` with ``phi_k`` centred at ``centers[k]``."""
    centers = points if centers is None else centers
    rx = points[None, :, 0] - centers[:, None, 0]
    ry = points[None, :, 1] - centers[:, None, 1]
    return rbf.value(rx, ry)
