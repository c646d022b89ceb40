import numpy as np
import pytest

from dgflow import (ConfigurationError, Mesh1D, Mesh2D, gauss_lobatto_rule,
                    physical_nodes, uniform_mesh_1d, uniform_mesh_2d)


def test_uniform_mesh_basics():
    mesh = uniform_mesh_1d(-1.0, 1.0, 2)
    np.testing.assert_array_equal(mesh.edges, [-1.0, 0.0, 1.0])
    np.testing.assert_array_equal(mesh.sizes, [1.0, 1.0])
    assert mesh.n_cells == 2 and mesh.is_uniform

    mesh = uniform_mesh_1d(-np.pi, np.pi, 20)
    np.testing.assert_allclose(mesh.sizes, np.pi / 10)

    mesh = uniform_mesh_1d(0.0, 1.0, 3)
    np.testing.assert_allclose(mesh.edges, [0, 1 / 3, 2 / 3, 1])
    assert abs(mesh.sizes.sum() - mesh.length) < 1e-12


def test_bad_meshes_rejected():
    with pytest.raises(ConfigurationError):
        uniform_mesh_1d(1.0, 1.0, 4)
    with pytest.raises(ConfigurationError):
        uniform_mesh_1d(0.0, 1.0, 0)
    with pytest.raises(ConfigurationError):
        Mesh1D(edges=np.array([0.0, 0.5, 0.5, 1.0]))


def test_nonuniform_supported():
    mesh = Mesh1D(edges=np.array([0.0, 0.1, 0.4, 1.0]))
    assert not mesh.is_uniform
    np.testing.assert_allclose(mesh.sizes, [0.1, 0.3, 0.6])


def test_periodic_wrap():
    mesh = uniform_mesh_1d(0, 1, 5)
    assert mesh.wrap(5) == 0 and mesh.wrap(-1) == 4


def test_physical_nodes_affine_and_bitwise_edges():
    rule = gauss_lobatto_rule(2)
    mesh = Mesh1D(edges=np.array([0.0, 2.0]))
    np.testing.assert_array_equal(physical_nodes(mesh, rule)[0], [0.0, 1.0, 2.0])

    rule1 = gauss_lobatto_rule(1)
    mesh1 = Mesh1D(edges=np.array([0.0, 1.0]))
    np.testing.assert_array_equal(physical_nodes(mesh1, rule1)[0], [0.0, 1.0])

    rule3 = gauss_lobatto_rule(3)
    mesh3 = Mesh1D(edges=np.array([-1.0, 1.0]))
    np.testing.assert_allclose(physical_nodes(mesh3, rule3)[0], rule3.nodes)

    # interface nodes must be the mesh edges, bitwise
    mesh = uniform_mesh_1d(-np.pi, np.pi, 17)
    x = physical_nodes(mesh, rule)
    assert np.array_equal(x[:, 0], mesh.edges[:-1])
    assert np.array_equal(x[:, -1], mesh.edges[1:])


def test_mesh2d():
    mesh = uniform_mesh_2d(0, 1, 4, -1, 1, 8)
    assert isinstance(mesh, Mesh2D)
    assert mesh.shape == (4, 8)
    assert mesh.x.length == 1.0 and mesh.y.length == 2.0
