"""Positivity-preserving scaling limiter and the weak-positivity step bound.

The limiter contracts each cell's nodal values toward the cell average,

    rho^new = avg + theta (rho - avg),   theta = min(avg / (avg - m), 1),

with m the cell's minimum nodal value.  It never changes the average, never
activates on already non-negative cells, and requires non-negative averages
to work at all; a negative average is the signal the time-step controller
consumes to halve the step.  Cell averages are exact Gauss-Lobatto sums
because the data are degree-k polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import NodalField
from .model import ModelSpec
from .spatial import SpatialAux

# limiter output may carry roundoff of this size below zero; it is clamped
_ROUNDOFF = 1e-14
# theta denominator below this means an (all-equal) 0/0 cell: leave untouched
_DENOM_FLOOR = 1e-300


class WeakPositivityViolated(RuntimeError):
    """A cell average went negative: the current time step is too large."""

    def __init__(self, cell):
        self.cell = cell
        super().__init__(f"negative cell average in cell {cell}")


@dataclass(frozen=True)
class LimiterReport:
    cells_modified: int
    min_theta: float
    min_value_before: float
    min_value_after: float


def cell_averages(field: NodalField) -> np.ndarray:
    """Per-cell averages: sum_r (w_r/2) rho_i^r, tensorized in 2D."""
    w = field.rule.weights
    if field.ndim == 1:
        return field.values @ (0.5 * w)
    return np.einsum("ijrs,r,s->ij", field.values, 0.5 * w, 0.5 * w)


def apply_positivity_limiter(field: NodalField) -> tuple[NodalField, LimiterReport]:
    """Scale nodal values toward the cell average until none is negative.

    Raises WeakPositivityViolated on the first cell whose average is
    negative.  Cells that are already non-negative are returned bitwise
    unchanged; tiny post-scaling negatives (roundoff) are clamped to zero.
    """
    vals = field.values
    cell_axes = tuple(range(field.ndim, vals.ndim))
    avg = cell_averages(field)
    m = vals.min(axis=cell_axes)

    min_before = float(m.min())
    if min_before >= 0.0:
        report = LimiterReport(cells_modified=0, min_theta=1.0,
                               min_value_before=min_before,
                               min_value_after=min_before)
        return field, report

    bad = avg < 0.0
    if bad.any():
        cell = np.unravel_index(int(np.argmax(bad)), bad.shape)
        raise WeakPositivityViolated(cell if len(cell) > 1 else cell[0])

    denom = avg - m
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.where(denom > _DENOM_FLOOR, avg / np.where(denom > 0, denom, 1.0), 1.0)
    theta = np.clip(theta, 0.0, 1.0)
    active = m < 0.0
    theta = np.where(active, theta, 1.0)

    shape = theta.shape + (1,) * len(cell_axes)
    new_vals = np.where(active.reshape(shape),
                        avg.reshape(shape) + theta.reshape(shape) * (vals - avg.reshape(shape)),
                        vals)
    new_vals[(new_vals < 0.0) & (new_vals > -_ROUNDOFF)] = 0.0

    report = LimiterReport(cells_modified=int(active.sum()),
                           min_theta=float(theta.min()),
                           min_value_before=min_before,
                           min_value_after=float(new_vals.min()))
    return field.with_values(new_vals), report


def _bound_ratio(num, den):
    """num/den with parasitic denominators removed: den <= 0 imposes nothing,
    and 0/0 (vacuum trace) contributes +inf by convention."""
    out = np.full(np.broadcast(num, den).shape, np.inf)
    pos = den > 0.0
    np.divide(num, den, out=out, where=pos)
    return out


def max_stable_dt(model: ModelSpec, rho: NodalField, aux: SpatialAux) -> float:
    """Weak-positivity time-step bound from the current interface states.

    Purely diagnostic: the step controller reacts to actual average
    violations by halving rather than enforcing this (conservative,
    state-dependent) bound a priori.
    """
    w = rho.rule.weights
    if rho.ndim == 1:
        iface = aux.interfaces["x"]
        h = rho.mesh.sizes
        fu_p = iface["f_p"] * iface["u_p"]
        fu_m = iface["f_m"] * iface["u_m"]
        ag_p = iface["alpha"] * model.g(iface["rho_p"])
        ag_m = iface["alpha"] * model.g(iface["rho_m"])
        # interface j is the left edge of cell j: its plus side constrains
        # cell j, its minus side constrains cell j-1
        lam_left = _bound_ratio(w[0] * iface["rho_p"], fu_p + ag_p)
        lam_right = np.roll(_bound_ratio(w[-1] * iface["rho_m"], ag_m - fu_m), -1)
        return float(np.min(np.minimum(lam_left, lam_right) * h))

    hmin = min(float(rho.mesh.x.sizes.min()), float(rho.mesh.y.sizes.min()))
    lam = np.inf
    for ax in ("x", "y"):
        iface = aux.interfaces[ax]
        fu_p = iface["f_p"] * iface["u_p"]
        fu_m = iface["f_m"] * iface["u_m"]
        ag_p = iface["alpha"] * model.g(iface["rho_p"])
        ag_m = iface["alpha"] * model.g(iface["rho_m"])
        lam = min(lam, float(np.min(_bound_ratio(w[0] * iface["rho_p"],
                                                 2.0 * (fu_p + ag_p)))))
        lam = min(lam, float(np.min(_bound_ratio(w[-1] * iface["rho_m"],
                                                 2.0 * (ag_m - fu_m)))))
    return hmin * lam
