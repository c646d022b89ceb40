import numpy as np
import pytest

from dgflow import ConfigurationError, gauss_lobatto_rule, lagrange_operators
from dgflow.quadrature import lagrange_basis_at


def legendre_coeffs(k):
    # P_k coefficients via the recurrence, highest degree last
    c0, c1 = np.array([1.0]), np.array([0.0, 1.0])
    if k == 0:
        return c0
    for n in range(1, k):
        nxt = np.zeros(n + 2)
        nxt[1:] = (2 * n + 1) * c1
        nxt[: n] -= n * c0
        nxt /= n + 1
        c0, c1 = c1, nxt
    return c1


@pytest.mark.parametrize("k", range(1, 9))
def test_nodes_are_lobatto_roots(k):
    """Oracle: nodes of the rule must be the roots of (1 - x^2) P_k'(x),
    found here independently with numpy's polynomial root finder."""
    rule = gauss_lobatto_rule(k)
    dP = np.polynomial.polynomial.polyder(legendre_coeffs(k))
    interior = np.sort(np.polynomial.polynomial.polyroots(dP).real)
    expected = np.concatenate(([-1.0], interior, [1.0]))
    assert rule.nodes[0] == -1.0 and rule.nodes[-1] == 1.0
    np.testing.assert_allclose(rule.nodes, expected, atol=1e-13)
    assert np.all(np.diff(rule.nodes) > 0)


@pytest.mark.parametrize("k", range(1, 9))
def test_weights_sum_and_exactness(k):
    rule = gauss_lobatto_rule(k)
    assert np.all(rule.weights > 0)
    assert abs(rule.weights.sum() - 2.0) < 1e-14
    for d in range(2 * k):
        exact = 2.0 / (d + 1) if d % 2 == 0 else 0.0
        approx = np.sum(rule.weights * rule.nodes ** d)
        assert abs(approx - exact) <= 1e-13, (k, d)


def test_symmetry():
    for k in range(1, 9):
        rule = gauss_lobatto_rule(k)
        np.testing.assert_array_equal(rule.nodes, -rule.nodes[::-1])
        np.testing.assert_array_equal(rule.weights, rule.weights[::-1])


def test_known_small_rules():
    r1 = gauss_lobatto_rule(1)
    np.testing.assert_allclose(r1.nodes, [-1, 1])
    np.testing.assert_allclose(r1.weights, [1, 1])
    r2 = gauss_lobatto_rule(2)
    np.testing.assert_allclose(r2.nodes, [-1, 0, 1])
    np.testing.assert_allclose(r2.weights, [1 / 3, 4 / 3, 1 / 3])
    r3 = gauss_lobatto_rule(3)
    np.testing.assert_allclose(r3.nodes, [-1, -1 / np.sqrt(5), 1 / np.sqrt(5), 1],
                               atol=1e-15)
    np.testing.assert_allclose(r3.weights, [1 / 6, 5 / 6, 5 / 6, 1 / 6], atol=1e-15)


@pytest.mark.parametrize("k", [0, -1, 9, 100])
def test_degree_range_rejected(k):
    with pytest.raises(ConfigurationError):
        gauss_lobatto_rule(k)


def test_linear_differentiation_matrix():
    ops = lagrange_operators(gauss_lobatto_rule(1))
    np.testing.assert_allclose(ops.D, [[-0.5, 0.5], [-0.5, 0.5]])


@pytest.mark.parametrize("k", range(1, 9))
def test_sbp_and_row_sums(k):
    ops = lagrange_operators(gauss_lobatto_rule(k))
    MD = ops.M @ ops.D
    np.testing.assert_allclose(MD + MD.T, ops.B, atol=1e-13)
    np.testing.assert_allclose(ops.D @ np.ones(k + 1), 0.0, atol=1e-13)


@pytest.mark.parametrize("k", range(1, 9))
def test_differentiates_polynomials_exactly(k):
    rule = gauss_lobatto_rule(k)
    ops = lagrange_operators(rule)
    rng = np.random.default_rng(k)
    coeffs = rng.standard_normal(k + 1)
    p = np.polynomial.polynomial.polyval(rule.nodes, coeffs)
    dp = np.polynomial.polynomial.polyval(
        rule.nodes, np.polynomial.polynomial.polyder(coeffs))
    scale = max(1.0, np.abs(dp).max())
    np.testing.assert_allclose(ops.D @ p, dp, atol=1e-12 * scale)


def test_lagrange_basis_kronecker_and_partition():
    rule = gauss_lobatto_rule(4)
    vals = lagrange_basis_at(rule, rule.nodes)
    np.testing.assert_allclose(vals, np.eye(5), atol=1e-14)
    z = np.linspace(-1, 1, 17)
    np.testing.assert_allclose(lagrange_basis_at(rule, z).sum(axis=-1), 1.0,
                               atol=1e-13)
