"""
This module stores fixtures for performing tests.
"""
import os
import numpy as np
import pytest
from uvarov import BasisSpec, MassSpec, SimplexJacobiParams, VertexMassModel


def pytest_configure(config):
    """
    Configure Pytest by adding a custom marker for setting the execution order of tests.

    This function is called during Pytest's configuration phase and is used to extend Pytest's
    functionality by adding custom markers. In this case, it adds a "order" marker to specify
    the execution order of tests.

    Parameters:
    - config (object): The Pytest configuration object.

    Example Usage:
    @pytest.mark.order(1)
    def test_example():
        # test code
    """
    config.addinivalue_line("markers", "order: Set the execution order of tests")


@pytest.fixture(name="small_config_path", scope='session')
def fixture_small_config_path():
    """Returns the path to the shipped verification configuration"""
    return os.path.join(os.path.dirname(__file__), '..', 'configs', 'small.json')


@pytest.fixture(name="chebyshev_basis", scope='session')
def fixture_chebyshev_basis():
    """Returns the d=1, kappa=0 basis: sqrt(2) T_n(2x - 1) on [0, 1]"""
    return BasisSpec(params=SimplexJacobiParams.symmetric(1, 0.0), max_degree=12)


@pytest.fixture(name="triangle_basis", scope='session')
def fixture_triangle_basis():
    """Returns the d=2, sigma=0 basis used by the vertex-mass tests"""
    return BasisSpec(params=SimplexJacobiParams.symmetric(2, 0.0), max_degree=10)


@pytest.fixture(name="skew_basis", scope='session')
def fixture_skew_basis():
    """Returns a d=2 basis with distinct kappa entries"""
    return BasisSpec(params=SimplexJacobiParams(2, (0.5, 1.0, 0.0)), max_degree=6)


@pytest.fixture(name="tetrahedron_basis", scope='session')
def fixture_tetrahedron_basis():
    """Returns the d=3, sigma=0.5 basis"""
    return BasisSpec(params=SimplexJacobiParams.symmetric(3, 0.5), max_degree=6)


@pytest.fixture(name="vertex_model", scope='session')
def fixture_vertex_model():
    """Returns unit masses at the vertices of the triangle with sigma=0"""
    return VertexMassModel(d=2, sigma=0.0, M=1.0)


@pytest.fixture(name="vertex_engine", scope='session')
def fixture_vertex_engine(vertex_model, triangle_basis):
    """Returns the general engine over the vertex masses"""
    return vertex_model.engine(triangle_basis)


@pytest.fixture(name="sobolev_mass", scope='session')
def fixture_sobolev_mass():
    """Returns gradient mass terms d/dx_1 at two points of the triangle"""
    return MassSpec.diagonal([[0.25, 0.25], [0.5, 0.25]], [1.0, 0.5], deriv_orders=[(1, 0), (1, 0)])


@pytest.fixture(name="triangle_points", scope='session')
def fixture_triangle_points():
    """Returns interior, edge and vertex points of the triangle"""
    return [
        np.array([1.0 / 3.0, 1.0 / 3.0]),
        np.array([0.2, 0.5]),
        np.array([0.1, 0.15]),
        np.array([0.5, 0.5]),
        np.array([0.0, 0.0]),
    ]


@pytest.fixture(name="random_points", scope='session')
def fixture_random_points():
    """Returns 5 random interior points of the triangle with a fixed seed"""
    rng = np.random.default_rng(20240611)
    return [rng.dirichlet(np.ones(3))[:2] for _ in range(5)]
