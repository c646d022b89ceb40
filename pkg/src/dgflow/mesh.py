"""Interval partitions (1D) and Cartesian tensor meshes (2D).

Only periodic boundary handling is built in; compactly supported problems
are run on a periodic box chosen large enough that the support never
reaches the boundary.  Edges are stored, not derived, so non-uniform
partitions are representable, but the fast convolution path requires a
uniform mesh and rejects anything else.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadrature import ConfigurationError, QuadRule


@dataclass(frozen=True, eq=False)
class Mesh1D:
    """Partition of [a, b] into N cells given by strictly increasing edges."""

    edges: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=float)
        if e.ndim != 1 or e.size < 2:
            raise ConfigurationError("mesh needs at least two edges")
        if not np.all(np.diff(e) > 0):
            raise ConfigurationError("mesh edges must be strictly increasing")
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)
        sizes = np.diff(e)
        sizes.setflags(write=False)
        object.__setattr__(self, "_sizes", sizes)
        object.__setattr__(self, "_node_cache", {})

    @property
    def a(self) -> float:
        return float(self.edges[0])

    @property
    def b(self) -> float:
        return float(self.edges[-1])

    @property
    def n_cells(self) -> int:
        return self.edges.size - 1

    @property
    def sizes(self) -> np.ndarray:
        return self._sizes

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def is_uniform(self) -> bool:
        h = self.sizes
        return bool(np.max(h) - np.min(h) <= 1e-12 * np.max(h))

    def wrap(self, i) -> np.ndarray:
        """Periodic cell index: wrap i into 0..N-1."""
        return np.mod(i, self.n_cells)


@dataclass(frozen=True, eq=False)
class Mesh2D:
    """Tensor-product mesh: an x-partition crossed with a y-partition."""

    x: Mesh1D
    y: Mesh1D

    @property
    def shape(self) -> tuple:
        return (self.x.n_cells, self.y.n_cells)


def uniform_mesh_1d(a: float, b: float, n: int) -> Mesh1D:
    """N equal cells on [a, b]."""
    if n < 1:
        raise ConfigurationError(f"cell count must be >= 1, got {n}")
    if not a < b:
        raise ConfigurationError(f"domain bounds must satisfy a < b, got [{a}, {b}]")
    return Mesh1D(edges=np.linspace(a, b, n + 1))


def uniform_mesh_2d(ax: float, bx: float, nx: int, ay: float, by: float, ny: int) -> Mesh2D:
    return Mesh2D(x=uniform_mesh_1d(ax, bx, nx), y=uniform_mesh_1d(ay, by, ny))


def physical_nodes(mesh: Mesh1D, rule: QuadRule) -> np.ndarray:
    """Gauss-Lobatto node coordinates per cell, shape (N, k+1).

    The first and last node of every cell are set to the cell edges bitwise,
    so interface nodes coincide exactly with the mesh edges.  Cached per
    rule: meshes and rules are immutable.
    """
    cached = mesh._node_cache.get(rule)
    if cached is not None:
        return cached
    left = mesh.edges[:-1]
    h = mesh.sizes
    x = left[:, None] + 0.5 * h[:, None] * (rule.nodes[None, :] + 1.0)
    x[:, 0] = mesh.edges[:-1]
    x[:, -1] = mesh.edges[1:]
    x.setflags(write=False)
    mesh._node_cache[rule] = x
    return x
