"""Per-cell nodal coefficient arrays: the discrete unknowns of the scheme.

A field stores the nodal values of a piecewise polynomial at the
Gauss-Lobatto points of every cell.  Because the basis is interpolatory,
the coefficients ARE the point values, and cell-interface traces are read
directly from the first/last nodal slot without any projection.

Shapes: (N, k+1) in 1D, indexed [cell, node]; (Nx, Ny, k+1, k+1) in 2D,
indexed [xcell, ycell, xnode, ynode].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import Mesh1D, Mesh2D, physical_nodes
from .quadrature import QuadRule, lagrange_basis_at


@dataclass(frozen=True)
class NodalField:
    """Value-semantic container for nodal coefficients on a mesh."""

    mesh: Mesh1D | Mesh2D
    rule: QuadRule
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        n = self.rule.npoints
        if self.ndim == 1:
            expect = (self.mesh.n_cells, n)
        else:
            expect = (*self.mesh.shape, n, n)
        if v.shape != expect:
            raise ValueError(f"field shape {v.shape} does not match mesh/rule {expect}")

    @property
    def ndim(self) -> int:
        return 2 if isinstance(self.mesh, Mesh2D) else 1

    def with_values(self, values: np.ndarray) -> "NodalField":
        return NodalField(mesh=self.mesh, rule=self.rule, values=values)

    def copy(self) -> "NodalField":
        return self.with_values(self.values.copy())

    def min(self) -> float:
        return float(self.values.min())


def node_coordinates(mesh, rule: QuadRule):
    """Physical node coordinates: (N, k+1) in 1D, a pair of broadcastable
    (Nx, 1, k+1, 1) / (1, Ny, 1, k+1) arrays in 2D."""
    if isinstance(mesh, Mesh2D):
        xs = physical_nodes(mesh.x, rule)[:, None, :, None]
        ys = physical_nodes(mesh.y, rule)[None, :, None, :]
        return xs, ys
    return physical_nodes(mesh, rule)


def interpolate(mesh, rule: QuadRule, fn) -> NodalField:
    """Nodal interpolation of a function onto the mesh.

    1D functions take x; 2D functions take (x, y) and must broadcast.
    """
    if isinstance(mesh, Mesh2D):
        xs, ys = node_coordinates(mesh, rule)
        vals = np.broadcast_to(fn(xs, ys), (*mesh.shape, rule.npoints, rule.npoints))
        return NodalField(mesh=mesh, rule=rule, values=np.array(vals, dtype=float))
    x = node_coordinates(mesh, rule)
    vals = np.broadcast_to(fn(x), x.shape)
    return NodalField(mesh=mesh, rule=rule, values=np.array(vals, dtype=float))


def evaluate(field: NodalField, x: np.ndarray) -> np.ndarray:
    """Evaluate the piecewise interpolation polynomial at arbitrary points.

    Points on a cell edge are attributed to the cell on their right (the
    domain's right endpoint wraps to the last cell), so the result is the
    trace from one fixed side.  1D only.
    """
    if field.ndim != 1:
        raise NotImplementedError("pointwise evaluation is 1D only")
    mesh = field.mesh
    x = np.asarray(x, dtype=float)
    idx = np.searchsorted(mesh.edges, x, side="right") - 1
    idx = np.clip(idx, 0, mesh.n_cells - 1)
    left = mesh.edges[idx]
    h = mesh.sizes[idx]
    z = 2.0 * (x - left) / h - 1.0
    basis = lagrange_basis_at(field.rule, z)  # (..., k+1)
    return np.einsum("...r,...r->...", basis, field.values[idx])
