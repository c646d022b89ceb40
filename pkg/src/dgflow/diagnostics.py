"""Discrete entropy, dissipation, error norms, and decay-rate extraction.

All integrals here are the scheme's own Gauss-Lobatto sums, so the entropy
reported is exactly the quantity the semi-discrete analysis controls.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convolution import ConvolutionPlan
from .field import NodalField, node_coordinates
from .model import EntropyParts, ModelSpec
from .quadrature import OperatorSet, lagrange_operators
from .spatial import compute_velocity, compute_xi


class InsufficientDataError(ValueError):
    """Fewer than three usable points for a rate fit."""


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    mass: float
    entropy: EntropyParts
    dissipation: float
    min_rho: float
    tau: float
    limited_cells: int


def quad_weights(field: NodalField) -> np.ndarray:
    """Quadrature weight of every node: (h_i/2) w_r, tensorized in 2D."""
    w = field.rule.weights
    if field.ndim == 1:
        return 0.5 * field.mesh.sizes[:, None] * w[None, :]
    wx = 0.5 * field.mesh.x.sizes[:, None] * w[None, :]
    wy = 0.5 * field.mesh.y.sizes[:, None] * w[None, :]
    return wx[:, None, :, None] * wy[None, :, None, :]


def quad_integral(field: NodalField, values=None) -> float:
    """Gauss-Lobatto integral of nodal values over the whole domain."""
    v = field.values if values is None else values
    return float(np.sum(quad_weights(field) * v))


def quad_inner(field: NodalField, a: np.ndarray, b: np.ndarray) -> float:
    """Quadrature pairing <a, b> over the domain."""
    return float(np.sum(quad_weights(field) * a * b))


def total_mass(field: NodalField) -> float:
    return quad_integral(field)


def discrete_entropy(model: ModelSpec, rho: NodalField,
                     plan: ConvolutionPlan | None = None) -> EntropyParts:
    """Entropy split into internal, confinement, and interaction parts.

    The interaction term is (1/2) <rho, W*rho> with the same convolution
    route the scheme itself uses, so entropy decay statements refer to the
    actual discrete dynamics.
    """
    internal = quad_integral(rho, model.H(rho.values))
    confinement = 0.0
    if model.V is not None:
        if rho.ndim == 2:
            xs, ys = node_coordinates(rho.mesh, rho.rule)
            vvals = model.V(xs, ys) * np.ones_like(rho.values)
        else:
            vvals = model.V(node_coordinates(rho.mesh, rho.rule))
        confinement = quad_inner(rho, vvals, rho.values)
    interaction = 0.0
    if model.W is not None:
        if plan is None:
            raise ValueError("model has an interaction kernel, supply a plan")
        interaction = 0.5 * quad_inner(rho, rho.values, plan.apply(rho))
    return EntropyParts(internal=internal, confinement=confinement,
                        interaction=interaction)


def discrete_dissipation(model: ModelSpec, rho: NodalField,
                         plan: ConvolutionPlan | None = None,
                         ops: OperatorSet | None = None) -> float:
    """Entropy dissipation: the quadrature integral of f(rho) |u|^2."""
    if ops is None:
        ops = lagrange_operators(rho.rule)
    xi = compute_xi(model, rho, plan)
    u = compute_velocity(xi, rho, ops, overrides=model.xi_boundary_override
                         if rho.ndim == 1 else None)
    if rho.ndim == 1:
        speed2 = u * u
    else:
        speed2 = u[0] * u[0] + u[1] * u[1]
    return quad_inner(rho, model.f(rho.values), speed2)


def error_norms(rho: NodalField, exact) -> tuple[float, float, float]:
    """Discrete (L1, L2, Linf) errors against a reference.

    `exact` is either a function of the physical coordinates or a NodalField
    on the very same mesh and rule (resampling between meshes is not done
    here; evaluate reference polynomials at the caller's nodes instead).
    """
    if isinstance(exact, NodalField):
        if exact.mesh is not rho.mesh and (
                exact.values.shape != rho.values.shape):
            raise ValueError("reference field lives on a different mesh; "
                             "evaluate it at this field's nodes instead")
        ref = exact.values
    elif callable(exact):
        if rho.ndim == 2:
            xs, ys = node_coordinates(rho.mesh, rho.rule)
            ref = exact(xs, ys) * np.ones_like(rho.values)
        else:
            ref = exact(node_coordinates(rho.mesh, rho.rule))
    else:
        raise TypeError("exact must be a callable or a NodalField")
    err = np.abs(rho.values - ref)
    wq = quad_weights(rho)
    l1 = float(np.sum(wq * err))
    l2 = float(np.sqrt(np.sum(wq * err * err)))
    linf = float(err.max())
    return l1, l2, linf


def decay_rate_fit(times, values, window: tuple | None = None) -> float:
    """Least-squares slope of log(values) against time.

    Restricted to `window` = (t0, t1) when given, and truncated at the first
    non-positive value (beyond which the log-scale signal is discretization
    noise).  Requires at least three usable points.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if window is not None:
        keep = (t >= window[0]) & (t <= window[1])
        t, v = t[keep], v[keep]
    bad = v <= 0.0
    if bad.any():
        cut = int(np.argmax(bad))
        t, v = t[:cut], v[:cut]
    if t.size < 3:
        raise InsufficientDataError(
            f"decay fit needs at least 3 positive samples, got {t.size}")
    return float(np.polyfit(t, np.log(v), 1)[0])
