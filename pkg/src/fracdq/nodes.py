"""Collocation node sets: generators, partition into interior/boundary, text I/O."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import qmc

from .geometry import Domain, Interval, Location, Point2, classify

NODE_FILE_HEADER = "# fracdq nodes v1"
MIN_SEPARATION = 1e-12
MIN_GENERATED = 8


class NodeSetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class NodeSet:
    """Ordered collocation points with the interior/boundary partition.

    ``points`` is an ``(M+1, 2)`` array; 1D sets carry ``y = 0``.
    """

    points: np.ndarray
    interior_idx: np.ndarray
    boundary_idx: np.ndarray

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float).reshape(-1, 2))
        pts.setflags(write=False)
        inner = np.asarray(self.interior_idx, dtype=np.intp)
        bnd = np.asarray(self.boundary_idx, dtype=np.intp)
        for arr in (inner, bnd):
            arr.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "interior_idx", inner)
        object.__setattr__(self, "boundary_idx", bnd)
        n = len(pts)
        if not np.all(np.isfinite(pts)):
            raise NodeSetError("node coordinates must be finite")
        both = np.concatenate([inner, bnd])
        if len(both) != n or not np.array_equal(np.sort(both), np.arange(n)):
            raise NodeSetError("interior and boundary indices must partition 0..M")
        if n > 1:
            dist, _ = cKDTree(pts).query(pts, k=2)
            if dist[:, 1].min() <= MIN_SEPARATION:
                i = int(np.argmin(dist[:, 1]))
                raise NodeSetError(f"duplicate node near {tuple(pts[i])}")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def M(self) -> int:
        return len(self.points) - 1

    @property
    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(len(self), dtype=bool)
        mask[self.boundary_idx] = True
        return mask

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, NodeSet):
            return NotImplemented
        return (
            np.array_equal(self.points, other.points)
            and np.array_equal(self.interior_idx, other.interior_idx)
            and np.array_equal(self.boundary_idx, other.boundary_idx)
        )

    @classmethod
    def from_mask(cls, points, boundary_mask) -> "NodeSet":
        mask = np.asarray(boundary_mask, dtype=bool)
        return cls(points, np.flatnonzero(~mask), np.flatnonzero(mask))

    def validate(self, domain: Domain) -> None:
        """Check every point against ``domain``; raise naming the first mismatch."""
        mask = self.boundary_mask
        for i, p in enumerate(self.points):
            loc = classify(domain, p)
            want = Location.BOUNDARY if mask[i] else Location.INTERIOR
            if loc is not want:
                raise NodeSetError(
                    f"node {i} at ({float(p[0])!r}, {float(p[1])!r}) is flagged {want.value} "
                    f"but classifies as {loc.value}"
                )


def chebyshev_1d(a: float, b: float, M: int) -> NodeSet:
    """Chebyshev-Gauss-Lobatto nodes ``0.5 (1 - cos(j pi / M)) (b - a) + a``."""
    if M < 2:
        raise NodeSetError(f"need M >= 2, got {M}")
    if not a < b:
        raise NodeSetError(f"need a < b, got [{a}, {b}]")
    j = np.arange(M + 1)
    x = 0.5 * (1.0 - np.cos(j * np.pi / M)) * (b - a) + a
    x[0], x[-1] = a, b
    upper = np.arange(M // 2 + 1, M + 1)
    x[upper] = (a + b) - x[M - upper]
    if M % 2 == 0:
        x[M // 2] = 0.5 * (a + b)  # cos(pi/2) is not exactly 0 in floating point
    pts = np.column_stack([x, np.zeros_like(x)])
    inner = np.arange(1, M)
    return NodeSet(pts, inner, np.array([0, M]))


def _dedupe(points: np.ndarray, radius: float) -> np.ndarray:
    """Keep the first of any group of points closer than ``radius``."""
    keep = []
    tree = cKDTree(points)
    dropped = np.zeros(len(points), dtype=bool)
    for i in range(len(points)):
        if dropped[i]:
            continue
        keep.append(i)
        for j in tree.query_ball_point(points[i], radius):
            if j > i:
                dropped[j] = True
    return points[keep]


def _lattice(domain: Domain, h: float):
    x0, y0, x1, y1 = domain.bbox()
    nx = int(round((x1 - x0) / h))
    ny = int(round((y1 - y0) / h))
    xs = x0 + h * np.arange(nx + 1)
    ys = y0 + h * np.arange(ny + 1)
    X, Y = np.meshgrid(xs, ys)
    cand = np.column_stack([X.ravel(), Y.ravel()])
    interior, boundary = [], []
    for p in cand:
        loc = classify(domain, p)
        if loc is Location.BOUNDARY:
            boundary.append(tuple(domain.project(Point2(*p))))
        elif loc is Location.INTERIOR and domain.distance_to_boundary(Point2(*p)) >= 0.25 * h:
            interior.append(p)
    return np.array(interior).reshape(-1, 2), np.array(boundary).reshape(-1, 2)


def _assemble(domain: Domain, interior: np.ndarray, boundary: np.ndarray, h: float) -> NodeSet:
    boundary = _dedupe(boundary, 0.5 * h) if len(boundary) else boundary
    pts = np.vstack([boundary, interior])
    mask = np.zeros(len(pts), dtype=bool)
    mask[: len(boundary)] = True
    # lexicographic (y, x) order gives a stable, readable layout
    order = np.lexsort((np.round(pts[:, 0], 12), np.round(pts[:, 1], 12)))
    return NodeSet.from_mask(pts[order], mask[order])


def _grid_nodes(domain: Domain, h: float) -> NodeSet:
    bnd = domain.sample_boundary(h)
    interior, lat_bnd = _lattice(domain, h)
    boundary = np.vstack([bnd, lat_bnd]) if len(lat_bnd) else bnd
    return _assemble(domain, interior, boundary, h)


def grid_2d(domain: Domain, target_count: int) -> NodeSet:
    """Uniform lattice plus boundary samples at the lattice spacing.

    The spacing is ``bbox_width / n`` with the integer ``n`` whose node count
    comes closest to ``target_count``. Lattice points on the boundary are
    snapped onto it; interior lattice points closer than a quarter spacing to
    the boundary are dropped to keep the collocation matrix well conditioned.
    """
    if isinstance(domain, Interval):
        raise NodeSetError("grid_2d needs a 2D domain")
    if target_count < MIN_GENERATED:
        raise NodeSetError(f"target_count must be at least {MIN_GENERATED}")
    x0, _, x1, _ = domain.bbox()
    width = x1 - x0
    best = None
    n0 = max(2, int(math.sqrt(target_count * width**2 / domain.area())))
    for n in range(max(2, n0 - 6), n0 + 7):
        nodes = _grid_nodes(domain, width / n)
        err = abs(len(nodes) - target_count)
        if best is None or err < best[0]:
            best = (err, nodes)
    nodes = best[1]
    if len(nodes) < MIN_GENERATED:
        raise NodeSetError(f"only {len(nodes)} nodes generated")
    return nodes


def scattered_2d(domain: Domain, target_count: int, seed: int = 0) -> NodeSet:
    """Quasi-random scattered nodes: scrambled Halton fill plus boundary samples.

    Interior candidates come from a scrambled Halton sequence (bases 2, 3)
    over the bounding box and are accepted greedily when they lie at least
    ``0.5 * diameter / sqrt(target_count)`` from every accepted node and half
    that from the boundary. The boundary is sampled at the spacing implied by
    ``target_count``.
    """
    if isinstance(domain, Interval):
        raise NodeSetError("scattered_2d needs a 2D domain")
    if target_count < MIN_GENERATED:
        raise NodeSetError(f"target_count must be at least {MIN_GENERATED}")
    area, perim = domain.area(), domain.perimeter()
    # area/h^2 + perimeter/h = target
    h = (perim + math.sqrt(perim**2 + 4.0 * area * target_count)) / (2.0 * target_count)
    boundary = _dedupe(domain.sample_boundary(h), 0.5 * h)
    sep = 0.5 * domain.diameter / math.sqrt(target_count)
    n_interior = target_count - len(boundary)
    if n_interior < 1:
        raise NodeSetError(f"target_count {target_count} too small for the boundary sampling")

    x0, y0, x1, y1 = domain.bbox()
    sampler = qmc.Halton(d=2, scramble=True, seed=seed)
    placed = np.empty((len(boundary) + n_interior, 2))
    placed[: len(boundary)] = boundary
    count = len(boundary)
    batch = 4 * target_count
    drawn = 0
    while count < len(placed) and drawn < 400 * target_count:
        cand = qmc.scale(sampler.random(batch), [x0, y0], [x1, y1])
        drawn += batch
        for p in cand:
            q = Point2(float(p[0]), float(p[1]))
            if classify(domain, q) is not Location.INTERIOR:
                continue
            if domain.distance_to_boundary(q) < 0.5 * sep:
                continue
            diff = placed[:count] - p
            if np.min(np.einsum("ij,ij->i", diff, diff)) < sep * sep:
                continue
            placed[count] = p
            count += 1
            if count == len(placed):
                break
    accepted = placed[len(boundary) : count]
    if len(accepted) < n_interior:
        raise NodeSetError(
            f"could only place {len(boundary) + len(accepted)} of {target_count} nodes "
            f"with separation {sep:.4g}"
        )
    pts = placed[:count]
    mask = np.zeros(len(pts), dtype=bool)
    mask[: len(boundary)] = True
    return NodeSet.from_mask(pts, mask)


def save_nodes(nodes: NodeSet, path) -> None:
    mask = nodes.boundary_mask
    lines = [NODE_FILE_HEADER]
    for (x, y), b in zip(nodes.points, mask):
        lines.append(f"{float(x)!r} {float(y)!r} {'boundary' if b else 'interior'}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_nodes(path, domain: Domain) -> NodeSet:
    """Read a node file and re-validate every point against ``domain``."""
    pts, flags = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3 or parts[2] not in ("interior", "boundary"):
                raise NodeSetError(f"{path}:{lineno}: expected 'x y interior|boundary', got {line!r}")
            try:
                x, y = float(parts[0]), float(parts[1])
            except ValueError as exc:
                raise NodeSetError(f"{path}:{lineno}: bad coordinate in {line!r}") from exc
            pts.append((x, y))
            flags.append(parts[2] == "boundary")
    if not pts:
        raise NodeSetError(f"{path}: no nodes found")
    nodes = NodeSet.from_mask(np.array(pts), np.array(flags))
    nodes.validate(domain)
    return nodes
