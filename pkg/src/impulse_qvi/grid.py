"""Uniform box grids, multilinear interpolation and finite-difference gradients.

Nodes are stored in row-major (C) order: the last axis varies fastest.  The
same order is used for flat value vectors and for CSV rows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .problem import Box

__all__ = [
    "Grid",
    "GridFunction",
    "interpolation_stencil",
    "interpolation_matrix",
    "interpolate",
    "gradient_fd",
    "gradient_field",
    "boundary_zone_mask",
]

# snap fractional cell coordinates this close to an integer onto the node
_SNAP = 1e-10


@dataclass(frozen=True)
class Grid:
    lower: np.ndarray
    upper: np.ndarray
    nodes_per_axis: tuple

    def __post_init__(self):
        box = Box(self.lower, self.upper)
        counts = tuple(int(k) for k in np.atleast_1d(self.nodes_per_axis))
        if len(counts) != box.dimension:
            raise ValueError("nodes_per_axis length must match the box dimension")
        if any(k < 2 for k in counts):
            raise ValueError("need at least 2 nodes per axis")
        object.__setattr__(self, "lower", box.lower)
        object.__setattr__(self, "upper", box.upper)
        object.__setattr__(self, "nodes_per_axis", counts)

    @classmethod
    def from_box(cls, box: Box, nodes_per_axis) -> "Grid":
        return cls(box.lower, box.upper, nodes_per_axis)

    @property
    def box(self) -> Box:
        return Box(self.lower, self.upper)

    @property
    def dimension(self) -> int:
        return self.lower.size

    @property
    def shape(self) -> tuple:
        return self.nodes_per_axis

    @property
    def size(self) -> int:
        return int(np.prod(self.nodes_per_axis))

    @property
    def spacing(self) -> np.ndarray:
        return (self.upper - self.lower) / (np.asarray(self.nodes_per_axis) - 1)

    @property
    def axes(self) -> list:
        return [np.linspace(lo, hi, k) for lo, hi, k in zip(self.lower, self.upper, self.nodes_per_axis)]

    def nodes(self) -> np.ndarray:
        """All node coordinates, shape ``(size, n)``, row-major."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def flat_index(self, multi_index) -> int:
        return int(np.ravel_multi_index(tuple(multi_index), self.shape))

    def multi_index(self, flat) -> tuple:
        return tuple(int(i) for i in np.unravel_index(int(flat), self.shape))


@dataclass(frozen=True)
class GridFunction:
    """Node values of a function on ``grid``; ``values`` has shape ``grid.shape``."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size != self.grid.size:
            raise ValueError(f"expected {self.grid.size} values, got {v.size}")
        v = v.reshape(self.grid.shape).copy()
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "GridFunction":
        return cls(grid, np.asarray(fn(grid.nodes()), dtype=float))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "GridFunction":
        return cls(grid, np.full(grid.size, float(value)))

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def __call__(self, x):
        return interpolate(self, x)


def interpolation_stencil(grid: Grid, points) -> tuple[np.ndarray, np.ndarray]:
    """Flat node indices and weights for clamped multilinear interpolation.

    Returns ``(idx, w)`` of shape ``(m, 2**n)``; weights are nonnegative and
    sum to one, so interpolation is monotone and sup-norm nonexpansive.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, grid.dimension)
    pts = np.clip(pts, grid.lower, grid.upper)
    t = (pts - grid.lower) / grid.spacing
    r = np.rint(t)
    t = np.where(np.abs(t - r) < _SNAP, r, t)
    counts = np.asarray(grid.nodes_per_axis)
    i0 = np.clip(np.floor(t).astype(np.int64), 0, counts - 2)
    frac = t - i0

    strides = np.array([int(np.prod(counts[k + 1:])) for k in range(grid.dimension)], dtype=np.int64)
    corners = list(itertools.product((0, 1), repeat=grid.dimension))
    idx = np.empty((pts.shape[0], len(corners)), dtype=np.int64)
    w = np.empty((pts.shape[0], len(corners)))
    for c, bits in enumerate(corners):
        bits = np.asarray(bits)
        idx[:, c] = (i0 + bits) @ strides
        w[:, c] = np.prod(np.where(bits, frac, 1.0 - frac), axis=1)
    return idx, w


def interpolation_matrix(grid: Grid, points) -> sp.csr_matrix:
    """Sparse ``(m, size)`` operator with ``M @ values.ravel()`` = interpolants."""
    idx, w = interpolation_stencil(grid, points)
    rows = np.repeat(np.arange(idx.shape[0]), idx.shape[1])
    return sp.csr_matrix((w.ravel(), (rows, idx.ravel())), shape=(idx.shape[0], grid.size))


def interpolate(gf: GridFunction, x):
    """Multilinear interpolation of ``gf`` at ``x`` after clamping into the box.

    ``x`` has shape ``(n,)`` (returns a float) or ``(..., n)``.
    """
    grid = gf.grid
    x = np.asarray(x, dtype=float)
    if grid.dimension == 1 and x.ndim == 0:
        x = x[None]
    idx, w = interpolation_stencil(grid, x)
    out = np.sum(gf.flat[idx] * w, axis=1)
    if x.ndim == 1:
        return float(out[0])
    return out.reshape(x.shape[:-1])


def gradient_field(gf: GridFunction) -> np.ndarray:
    """Gradients at every node, shape ``(size, n)``.

    Central differences inside, first-order one-sided differences on faces.
    """
    h = gf.grid.spacing
    grads = np.gradient(gf.values, *h, edge_order=1)
    if gf.grid.dimension == 1:
        grads = [grads]
    return np.stack([g.ravel() for g in grads], axis=-1)


def gradient_fd(gf: GridFunction, node_index) -> np.ndarray:
    """Finite-difference gradient at one node (multi-index or flat index)."""
    grid = gf.grid
    if np.ndim(node_index) == 0:
        if not 0 <= int(node_index) < grid.size:
            raise IndexError(f"node {node_index} out of range")
        node_index = grid.multi_index(node_index)
    node_index = tuple(int(i) for i in node_index)
    if len(node_index) != grid.dimension or any(
        not 0 <= i < k for i, k in zip(node_index, grid.shape)
    ):
        raise IndexError(f"invalid node index {node_index}")
    v = gf.values
    g = np.empty(grid.dimension)
    for axis, (i, k, h) in enumerate(zip(node_index, grid.shape, grid.spacing)):
        def at(j):
            m = list(node_index)
            m[axis] = j
            return v[tuple(m)]
        if i == 0:
            g[axis] = (at(1) - at(0)) / h
        elif i == k - 1:
            g[axis] = (at(k - 1) - at(k - 2)) / h
        else:
            g[axis] = (at(i + 1) - at(i - 1)) / (2 * h)
    return g


def boundary_zone_mask(grid: Grid, margin: float) -> np.ndarray:
    """Flat boolean mask of nodes within ``margin`` of the box boundary.

    Face nodes are always included, so the complement never contains a node
    where one-sided differences are used.
    """
    x = grid.nodes()
    dist = np.minimum(x - grid.lower, grid.upper - x)
    h = grid.spacing
    on_face = np.any(dist < 0.5 * h, axis=1)
    return on_face | np.any(dist < float(margin) - 1e-12, axis=1)
