import numpy as np
import pytest

from dgflow import NodalField, gauss_lobatto_rule, interpolate, uniform_mesh_1d, uniform_mesh_2d
from dgflow.field import evaluate


def test_shape_checked():
    mesh = uniform_mesh_1d(0, 1, 4)
    rule = gauss_lobatto_rule(2)
    with pytest.raises(ValueError):
        NodalField(mesh=mesh, rule=rule, values=np.zeros((4, 4)))


def test_interpolation_hits_nodes():
    mesh = uniform_mesh_1d(-1, 1, 8)
    rule = gauss_lobatto_rule(3)
    f = interpolate(mesh, rule, lambda x: np.sin(3 * x))
    from dgflow import node_coordinates
    x = node_coordinates(mesh, rule)
    np.testing.assert_array_equal(f.values, np.sin(3 * x))


def test_evaluate_reproduces_polynomials():
    # degree-k data are represented exactly, so off-node evaluation is exact
    mesh = uniform_mesh_1d(-2, 3, 7)
    rule = gauss_lobatto_rule(3)
    poly = lambda x: 0.5 - x + 2 * x ** 2 - 0.25 * x ** 3
    f = interpolate(mesh, rule, poly)
    xs = np.linspace(-2, 3, 201)
    np.testing.assert_allclose(evaluate(f, xs), poly(xs), atol=1e-12, rtol=0)


def test_evaluate_on_edges_uses_right_cell():
    mesh = uniform_mesh_1d(0, 1, 2)
    rule = gauss_lobatto_rule(1)
    vals = np.array([[0.0, 1.0], [5.0, 6.0]])
    f = NodalField(mesh=mesh, rule=rule, values=vals)
    assert evaluate(f, np.array([0.5]))[0] == 5.0
    assert evaluate(f, np.array([1.0]))[0] == 6.0  # domain end stays in last cell


def test_2d_interpolation_shape():
    mesh = uniform_mesh_2d(0, 1, 3, 0, 2, 5)
    rule = gauss_lobatto_rule(2)
    f = interpolate(mesh, rule, lambda x, y: x + 10 * y)
    assert f.values.shape == (3, 5, 3, 3)
    assert f.ndim == 2
