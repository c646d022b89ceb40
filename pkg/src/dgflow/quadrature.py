"""Gauss-Lobatto quadrature rules and nodal collocation operators.

The k+1 Gauss-Lobatto points on [-1, 1] are the roots of (1 - z^2) P_k'(z),
with P_k the degree-k Legendre polynomial, and carry the weights
w_r = 2 / (k (k+1) P_k(z_r)^2).  A rule with k+1 points integrates
polynomials up to degree 2k-1 exactly and always includes both endpoints,
which is what lets cell-interface values double as quadrature nodes.

From a rule we build the nodal operator triple (M, D, B):

    M = diag(w_1, ..., w_{k+1})        lumped mass matrix
    D_{rs} = L_s'(z_r)                 differentiation of the Lagrange basis
    B = diag(-1, 0, ..., 0, 1)         boundary signature

which satisfies the summation-by-parts identity M D + (M D)^T = B.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_DEGREE = 8

_NEWTON_TOL = 1e-15
_NEWTON_MAXIT = 100


class ConfigurationError(ValueError):
    """Raised for invalid construction parameters (bad degree, bad mesh, ...)."""


@dataclass(frozen=True, eq=False)
class QuadRule:
    """A Gauss-Lobatto rule: degree k, k+1 nodes on [-1, 1], positive weights."""

    degree: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def npoints(self) -> int:
        return self.degree + 1


@dataclass(frozen=True, eq=False)
class OperatorSet:
    """Nodal operators (M, D, B) on the reference cell for one quadrature rule."""

    rule: QuadRule
    M: np.ndarray
    D: np.ndarray
    B: np.ndarray
    # -M^{-1} D^T M, the volume part of both the velocity and density updates
    A: np.ndarray = field(repr=False, default=None)


def _legendre(k: int, x: np.ndarray) -> np.ndarray:
    """Evaluate the Legendre polynomial P_k by the three-term recurrence."""
    p0 = np.ones_like(x)
    if k == 0:
        return p0
    p1 = x
    for n in range(1, k):
        p0, p1 = p1, ((2 * n + 1) * x * p1 - n * p0) / (n + 1)
    return p1


def _legendre_pair(k: int, x: np.ndarray):
    """Evaluate (P_k, P_k') for |x| < 1 by the three-term recurrence."""
    p0 = np.ones_like(x)
    p1 = x
    for n in range(1, k):
        p0, p1 = p1, ((2 * n + 1) * x * p1 - n * p0) / (n + 1)
    # derivative from the standard identity (1-x^2) P_k' = k (P_{k-1} - x P_k)
    dp = k * (p0 - x * p1) / (1.0 - x * x)
    return p1, dp


def gauss_lobatto_rule(k: int) -> QuadRule:
    """Return the k+1 point Gauss-Lobatto rule on [-1, 1].

    Interior nodes are found by Newton iteration on q(z) = (1 - z^2) P_k'(z),
    whose derivative reduces to q'(z) = -k (k+1) P_k(z) via the Legendre ODE.
    Chebyshev-Lobatto points seed the iteration and the final node set is
    symmetrized so that z_r = -z_{k+2-r} holds exactly.
    """
    if not isinstance(k, (int, np.integer)) or not (1 <= k <= MAX_DEGREE):
        raise ConfigurationError(
            f"polynomial degree must be an integer in 1..{MAX_DEGREE}, got {k!r}")
    k = int(k)

    nodes = np.empty(k + 1)
    nodes[0], nodes[-1] = -1.0, 1.0
    if k >= 2:
        # Chebyshev-Lobatto initial guesses for the interior roots
        z = -np.cos(np.pi * np.arange(1, k) / k)
        for _ in range(_NEWTON_MAXIT):
            pk, dpk = _legendre_pair(k, z)
            step = (1.0 - z * z) * dpk / (k * (k + 1) * pk)
            z = z + step
            if np.max(np.abs(step)) < _NEWTON_TOL:
                break
        nodes[1:-1] = z
    nodes = 0.5 * (nodes - nodes[::-1])  # kill asymmetric roundoff
    nodes[0], nodes[-1] = -1.0, 1.0

    pk = _legendre(k, nodes)
    weights = 2.0 / (k * (k + 1) * pk * pk)

    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadRule(degree=k, nodes=nodes, weights=weights)


def lagrange_operators(rule: QuadRule) -> OperatorSet:
    """Build (M, D, B) for the Lagrange basis at the rule's nodes.

    D uses the barycentric form: D_{rs} = (c_s / c_r) / (z_r - z_s) off the
    diagonal with c_s the barycentric weights, and rows summing to zero.
    """
    z = np.asarray(rule.nodes, dtype=float)
    n = z.size
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, 1.0)
    if np.min(np.abs(diff)) == 0.0:
        raise ConfigurationError("quadrature rule has duplicate nodes")

    c = 1.0 / np.prod(diff, axis=1)  # barycentric weights
    D = (c[None, :] / c[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -np.sum(D, axis=1))

    M = np.diag(rule.weights)
    B = np.zeros((n, n))
    B[0, 0], B[-1, -1] = -1.0, 1.0

    A = -(D.T * rule.weights[None, :]) / rule.weights[:, None]
    for a in (M, D, B, A):
        a.setflags(write=False)
    return OperatorSet(rule=rule, M=M, D=D, B=B, A=A)


def lagrange_basis_at(rule: QuadRule, z: np.ndarray) -> np.ndarray:
    """Evaluate all Lagrange basis polynomials at reference points z.

    Returns an array of shape z.shape + (k+1,).  Points falling exactly on a
    node reproduce the Kronecker property.
    """
    zn = np.asarray(rule.nodes)
    z = np.asarray(z, dtype=float)
    diff = z[..., None] - zn  # (..., k+1)
    hit = diff == 0.0
    on_node = hit.any(axis=-1)
    safe = np.where(hit, 1.0, diff)
    c = 1.0 / np.prod(zn[:, None] - zn[None, :] + np.eye(zn.size), axis=1)
    terms = c / safe
    vals = terms * np.prod(safe, axis=-1)[..., None]
    vals[on_node] = hit[on_node]
    return vals
