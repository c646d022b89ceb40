"""The semi-discrete DG operator.

Per cell, with M the lumped mass matrix, D the nodal differentiation matrix
and B = diag(-1, 0, ..., 0, 1), the scheme reads

    d rho_i / dt = -(2/h_i) M^{-1} D^T M (f u)_i + (2/h_i) M^{-1} B (f u)*_i
    u_i          = -(2/h_i) M^{-1} D^T M  xi_i   + (2/h_i) M^{-1} B  xi*_i
    xi_i^r       = H'(rho_i^r) + V(x_i^r) + (W * rho)_i^r

where starred vectors carry the interface fluxes: the central flux for xi
and a local Lax-Friedrichs flux with viscosity alpha = max(|u+|, |u-|) for
f u.  Everything is eliminated cell-locally (M is diagonal), so there is no
global solve.  Interface traces are read straight from the endpoint nodal
coefficients.  The 2D operator applies the same formulas dimension by
dimension on tensor-product cells, with alpha resolved pointwise along each
interface line.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convolution import ConvolutionPlan
from .field import NodalField, node_coordinates
from .mesh import Mesh2D
from .model import ModelSpec
from .quadrature import OperatorSet, lagrange_operators


@dataclass(frozen=True)
class InterfaceState:
    """Traces at one interface: minus = upwind cell endpoint, plus = downwind."""

    rho_minus: float
    rho_plus: float
    f_minus: float
    f_plus: float
    g_minus: float
    g_plus: float
    u_minus: float
    u_plus: float


def interface_flux_fu(state: InterfaceState, alpha_mult: float = 1.0) -> float:
    """Lax-Friedrichs-type flux (f u)^ = {f u} + (alpha/2) [g]."""
    alpha = alpha_mult * max(abs(state.u_plus), abs(state.u_minus))
    return (0.5 * (state.f_plus * state.u_plus + state.f_minus * state.u_minus)
            + 0.5 * alpha * (state.g_plus - state.g_minus))


@dataclass
class SpatialAux:
    """Intermediate quantities exposed for diagnostics and step-size bounds."""

    xi: np.ndarray
    u: np.ndarray | tuple
    interfaces: dict  # per axis: trace arrays and alpha at every interface


def compute_xi(model: ModelSpec, rho: NodalField, plan: ConvolutionPlan | None = None,
               ) -> np.ndarray:
    """Nodal potential xi = H'(rho) + V + W*rho (terms omitted when absent)."""
    xi = model.hprime_safe(rho.values)
    if model.V is not None:
        if rho.ndim == 2:
            xs, ys = node_coordinates(rho.mesh, rho.rule)
            xi = xi + model.V(xs, ys)
        else:
            xi = xi + model.V(node_coordinates(rho.mesh, rho.rule))
    if model.W is not None:
        if plan is None:
            raise ValueError("model has an interaction kernel, supply a plan")
        xi = xi + plan.apply(rho)
    return xi


def _prev(a: np.ndarray) -> np.ndarray:
    """Periodic shift bringing the previous cell's value to each slot (1D)."""
    return np.concatenate((a[-1:], a[:-1]))


def _next(a: np.ndarray) -> np.ndarray:
    """Periodic shift bringing the next cell's value to each slot (1D)."""
    return np.concatenate((a[1:], a[:1]))


def _cell_operator(values: np.ndarray, hat_left: np.ndarray, hat_right: np.ndarray,
                   h, ops: OperatorSet, axis: int) -> np.ndarray:
    """Apply (2/h) [A v + M^{-1} B v*] along one node axis.

    values:   nodal data, node index on `axis` (-2 for x, -1 for y in 2D)
    hat_*:    interface fluxes at the cell's left/right edge on that axis
    h:        cell sizes, broadcastable against the cell axes
    """
    w = ops.rule.weights
    if axis == -1:
        if values.ndim == 2:
            out = values @ ops.A.T
        else:
            out = np.einsum("rq,...q->...r", ops.A, values)
    else:
        out = np.einsum("rq,...qs->...rs", ops.A, values)
    idx_first = (Ellipsis, 0) if axis == -1 else (Ellipsis, 0, slice(None))
    idx_last = (Ellipsis, -1) if axis == -1 else (Ellipsis, -1, slice(None))
    out[idx_first] -= hat_left / w[0]
    out[idx_last] += hat_right / w[-1]
    return (2.0 / h) * out


def compute_velocity(xi: np.ndarray, rho: NodalField, ops: OperatorSet,
                     overrides: tuple | None = None):
    """Velocity from the potential via the per-cell matrix identity.

    The interface value of xi is the central flux; `overrides` optionally
    replaces it at the domain's left/right boundary edges (1D only).
    Returns u (1D) or the pair (u_x, u_y) (2D).
    """
    mesh = rho.mesh
    if rho.ndim == 1:
        h = mesh.sizes[:, None]
        xihat = 0.5 * (_prev(xi[:, -1]) + xi[:, 0])  # at left edge of each cell
        hat_left = xihat
        hat_right = _next(xihat)
        if overrides is not None:
            hat_left[0] = overrides[0]
            hat_right[-1] = overrides[1]
        return _cell_operator(xi, hat_left, hat_right, h, ops, axis=-1)
    if overrides is not None:
        raise ValueError("xi boundary overrides are only supported in 1D")
    hx = mesh.x.sizes[:, None, None, None]
    hy = mesh.y.sizes[None, :, None, None]
    xihat_x = 0.5 * (np.roll(xi[:, :, -1, :], 1, axis=0) + xi[:, :, 0, :])
    ux = _cell_operator(xi, xihat_x, np.roll(xihat_x, -1, axis=0),
                        hx, ops, axis=-2)
    xihat_y = 0.5 * (np.roll(xi[:, :, :, -1], 1, axis=1) + xi[:, :, :, 0])
    uy = _cell_operator(xi, xihat_y, np.roll(xihat_y, -1, axis=1),
                        hy, ops, axis=-1)
    return ux, uy


def _interface_arrays(rho_vals, u, f_vals, g_vals,
                      roll_axis: int, node_axis: int, alpha_mult: float):
    """Traces and flux at every interface along one axis (periodic wrap).

    Interface j sits at the left edge of cell j; minus traces come from cell
    j-1's trailing node, plus traces from cell j's leading node.
    """
    def edge(arr, last: bool):
        idx = [slice(None)] * arr.ndim
        idx[node_axis] = -1 if last else 0
        return arr[tuple(idx)]

    def minus(arr):
        trace = edge(arr, True)
        if trace.ndim == 1:
            return _prev(trace)
        return np.roll(trace, 1, axis=roll_axis)

    rho_m = minus(rho_vals)
    rho_p = edge(rho_vals, False)
    u_m = minus(u)
    u_p = edge(u, False)
    f_m = minus(f_vals)
    f_p = edge(f_vals, False)
    g_m = minus(g_vals)
    g_p = edge(g_vals, False)
    alpha = alpha_mult * np.maximum(np.abs(u_m), np.abs(u_p))
    fuhat = 0.5 * (f_p * u_p + f_m * u_m) + 0.5 * alpha * (g_p - g_m)
    return {"rho_m": rho_m, "rho_p": rho_p, "u_m": u_m, "u_p": u_p,
            "f_m": f_m, "f_p": f_p, "g_m": g_m, "g_p": g_p,
            "alpha": alpha, "fuhat": fuhat}


def compute_rhs(model: ModelSpec, rho: NodalField, t: float = 0.0,
                plan: ConvolutionPlan | None = None, ops: OperatorSet | None = None,
                alpha_mult: float = 1.0, return_aux: bool = False):
    """Assemble d rho/dt for the current state.

    Chains xi -> u -> nodal f u -> interface fluxes -> divergence, then adds
    the source term if the model declares one.  With return_aux=True also
    returns the intermediates needed by diagnostics.
    """
    if ops is None:
        ops = lagrange_operators(rho.rule)
    xi = compute_xi(model, rho, plan)
    vals = rho.values
    f_vals = model.f(vals)
    g_vals = model.g(vals)

    if rho.ndim == 1:
        u = compute_velocity(xi, rho, ops, overrides=model.xi_boundary_override)
        fu = f_vals * u
        iface = _interface_arrays(vals, u, f_vals, g_vals,
                                  roll_axis=0, node_axis=1, alpha_mult=alpha_mult)
        h = rho.mesh.sizes[:, None]
        rhs = _cell_operator(fu, iface["fuhat"], _next(iface["fuhat"]),
                             h, ops, axis=-1)
        if model.source is not None:
            rhs = rhs + model.source(node_coordinates(rho.mesh, rho.rule), t)
        if return_aux:
            return rhs, SpatialAux(xi=xi, u=u, interfaces={"x": iface})
        return rhs

    ux, uy = compute_velocity(xi, rho, ops)
    fux = f_vals * ux
    fuy = f_vals * uy
    iface_x = _interface_arrays(vals, ux, f_vals, g_vals,
                                roll_axis=0, node_axis=2, alpha_mult=alpha_mult)
    iface_y = _interface_arrays(vals, uy, f_vals, g_vals,
                                roll_axis=1, node_axis=3, alpha_mult=alpha_mult)
    hx = rho.mesh.x.sizes[:, None, None, None]
    hy = rho.mesh.y.sizes[None, :, None, None]
    rhs = _cell_operator(fux, iface_x["fuhat"], np.roll(iface_x["fuhat"], -1, axis=0),
                         hx, ops, axis=-2)
    rhs += _cell_operator(fuy, iface_y["fuhat"], np.roll(iface_y["fuhat"], -1, axis=1),
                          hy, ops, axis=-1)
    if model.source is not None:
        xs, ys = node_coordinates(rho.mesh, rho.rule)
        rhs = rhs + model.source(xs, ys, t)
    if return_aux:
        return rhs, SpatialAux(xi=xi, u=(ux, uy),
                               interfaces={"x": iface_x, "y": iface_y})
    return rhs
