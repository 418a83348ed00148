"""Input checks shared by the estimator layer."""
from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils import check_array

from .geometry import Domain, Interval, Location, classify
from .nodes import NodeSet


def check_points(X, name: str = "X", min_samples: int = 1) -> np.ndarray:
    """Coerce 1D coordinates or ``(n, 2)`` points to a finite ``(n, 2)`` float array."""
    arr = np.asarray(X, dtype=float) if not hasattr(X, "points") else X.points
    if arr.ndim == 1:
        arr = np.column_stack([arr, np.zeros_like(arr)])
    arr = check_array(arr, dtype=np.float64, ensure_min_samples=min_samples, input_name=name)
    if arr.shape[1] == 1:
        arr = np.column_stack([arr[:, 0], np.zeros(len(arr))])
    if arr.shape[1] != 2:
        raise ValueError(f"{name} must have one or two columns, got {arr.shape[1]}")
    return arr


def check_nodes(X, domain: Domain) -> NodeSet:
    """Accept a NodeSet or raw coordinates; raw points are partitioned by classification."""
    if isinstance(X, NodeSet):
        return X
    pts = check_points(X, min_samples=2)
    if isinstance(domain, Interval):
        pts[:, 1] = 0.0
    locs = [classify(domain, p) for p in pts]
    outside = [i for i, loc in enumerate(locs) if loc is Location.EXTERIOR]
    if outside:
        i = outside[0]
        raise ValueError(f"point {i} at {tuple(pts[i])} lies outside the domain")
    return NodeSet.from_mask(pts, [loc is Location.BOUNDARY for loc in locs])


def check_samples(U, n_nodes: int, name: str = "U") -> tuple[np.ndarray, bool]:
    """Nodal samples as ``(n_fields, n_nodes)``; also reports whether the input was 1D."""
    arr = np.asarray(U, dtype=float)
    flat = arr.ndim == 1
    arr = check_array(arr.reshape(1, -1) if flat else arr, dtype=np.float64, input_name=name)
    if arr.shape[1] != n_nodes:
        raise ValueError(f"{name} has {arr.shape[1]} nodal values, expected {n_nodes}")
    return arr, flat


def check_positive(value, name: str, integer: bool = False):
    kinds = numbers.Integral if integer else numbers.Real
    if isinstance(value, bool) or not isinstance(value, kinds) or not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive {'integer' if integer else 'number'}, got {value!r}")
    return value
