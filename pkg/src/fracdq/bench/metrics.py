"""Error norms, observed convergence rates and the 2D shape-parameter rule."""
from __future__ import annotations

import math

import numpy as np


def error_norms(numeric, exact) -> tuple[float, float]:
    """Root-mean-square and max-norm nodal errors over all nodes."""
    numeric = np.asarray(numeric, dtype=float)
    exact = np.asarray(exact, dtype=float)
    if numeric.shape != exact.shape:
        raise ValueError(f"length mismatch: {numeric.shape} vs {exact.shape}")
    diff = np.abs(exact - numeric)
    return float(np.sqrt(np.mean(diff**2))), float(np.max(diff))


def conv_rate(e1: float, e2: float, M1: int, M2: int, d: int = 1) -> float:
    """``d * log2(e1 / e2) / log2(M2 / M1)``."""
    if e1 <= 0.0 or e2 <= 0.0:
        raise ValueError("errors must be positive")
    if M1 == M2:
        raise ValueError("M1 and M2 must differ")
    if d not in (1, 2):
        raise ValueError(f"dimension must be 1 or 2, got {d}")
    return d * math.log2(e1 / e2) / math.log2(M2 / M1)


def shape_param(c_star: float, M: int) -> float:
    """``c_star / (M + 1)^0.25``."""
    if not c_star > 0.0:
        raise ValueError(f"c_star must be positive, got {c_star}")
    return c_star / (M + 1) ** 0.25
