"""
Tests for the measure-agnostic modification engine and the mass specification.
"""
from concurrent.futures import ThreadPoolExecutor
import numpy as np
import pytest
from uvarov import (
    BasisSpec,
    DerivativeOrderNotSupported,
    IndefiniteMassMatrix,
    InvalidDimension,
    InvalidParameters,
    MassSpec,
    MultiIndex,
    SimplexJacobiParams,
    UvarovEngine,
)


@pytest.fixture(name="sobolev_engine", scope='module')
def fixture_sobolev_engine(triangle_basis, sobolev_mass):
    """Returns the engine over gradient mass terms"""
    return UvarovEngine(provider=triangle_basis, mass=sobolev_mass)


@pytest.fixture(name="coupled_engine", scope='module')
def fixture_coupled_engine(skew_basis):
    """Returns the engine over two interior points coupled by a full mass matrix"""
    mass = MassSpec(points=[[0.2, 0.3], [0.6, 0.1]], mass_matrix=[[2.0, 1.0], [1.0, 1.0]])
    return UvarovEngine(provider=skew_basis, mass=mass)


@pytest.mark.order(1)
def test_mass_spec_validation():
    """
    Checking shape, symmetry, duplicate and derivative order validation of mass conditions
    """
    with pytest.raises(InvalidDimension):
        MassSpec(points=[[0.1, 0.1], [0.2, 0.2]], mass_matrix=[[1.0]])
    with pytest.raises(IndefiniteMassMatrix):
        MassSpec(points=[[0.1, 0.1], [0.2, 0.2]], mass_matrix=[[1.0, 0.5], [0.0, 1.0]])
    with pytest.raises(InvalidParameters):
        MassSpec.uniform([[0.1, 0.1], [0.1, 0.1]], 1.0)
    with pytest.raises(DerivativeOrderNotSupported):
        MassSpec.diagonal([[0.1, 0.1]], [1.0], deriv_orders=[(2, 1)])
    with pytest.raises(InvalidParameters):
        MassSpec.uniform([[np.nan, 0.1]], 1.0)
    same_point = MassSpec.diagonal([[0.1, 0.1], [0.1, 0.1]], [1.0, 1.0], deriv_orders=[(0, 0), (1, 0)])
    assert same_point.N == 2 and not same_point.is_plain
    plain = MassSpec.uniform([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]], 1.0)
    assert plain.N == 3 and plain.d == 2 and plain.is_plain
    assert plain.deriv_orders[0] == MultiIndex.zero(2)


@pytest.mark.order(2)
def test_engine_rejects_bad_configurations(triangle_basis, chebyshev_basis):
    """
    Checking the dimension and semidefiniteness checks of the engine
    """
    with pytest.raises(InvalidDimension):
        UvarovEngine(provider=chebyshev_basis, mass=MassSpec.uniform([[0.1, 0.1]], 1.0))
    indefinite = MassSpec(points=[[0.1, 0.1], [0.3, 0.3]], mass_matrix=[[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(IndefiniteMassMatrix):
        UvarovEngine(provider=triangle_basis, mass=indefinite)
    engine = UvarovEngine(provider=triangle_basis, mass=MassSpec.uniform([[0.1, 0.1]], 1.0))
    with pytest.raises(InvalidDimension):
        engine.build_state(11)


@pytest.mark.order(3)
def test_single_endpoint_mass():
    """
    Checking K_0(nu; x, x) = 1 / (1 + M) for a mass at the endpoint of [0, 1]
    """
    spec = BasisSpec(params=SimplexJacobiParams(1, (0.0, 0.0)), max_degree=4)
    engine = UvarovEngine(provider=spec, mass=MassSpec.uniform([[1.0]], 1.0))
    assert engine.modified_sum_kernel(0, [0.5], [0.5]) == pytest.approx(0.5, rel=1e-14)
    assert engine.christoffel(0, [0.3]) == pytest.approx(2.0, rel=1e-14)


@pytest.mark.order(4)
@pytest.mark.parametrize("engine_name", ["vertex_engine", "sobolev_engine", "coupled_engine"])
def test_matrix_identities(request, engine_name):
    """
    Checking the telescoping, difference, inverse and symmetry identities of every state
    """
    engine = request.getfixturevalue(engine_name)
    for n in range(min(engine.provider.max_degree, 8) + 1):
        residuals = engine.matrix_identity_residuals(n)
        assert set(residuals) == {'telescoping', 'difference', 'h_inverse', 'symmetry'}
        for name, value in residuals.items():
            assert value < 1e-10, f"{name} residual {value} at degree {n}"
        h_block, h_inv = engine.h_blocks(n)
        np.testing.assert_allclose(h_block, h_block.T, atol=1e-12)
        assert np.linalg.eigvalsh(h_block).min() >= 1.0 - 1e-12


@pytest.mark.order(5)
def test_modified_polynomials(vertex_engine, triangle_basis):
    """
    Checking Q_0 = P_0, the identity leading block and the expansion of Q_n in the base blocks
    """
    x = [0.2, 0.5]
    np.testing.assert_allclose(vertex_engine.q_eval(0, x), triangle_basis.evaluate(0, x))
    for n in range(1, 7):
        coefficients = vertex_engine.q_coefficients(n)
        r = triangle_basis.dims(n)
        np.testing.assert_array_equal(coefficients[:, -r:], np.eye(r))
        stacked = np.concatenate(triangle_basis.evaluate_all(n, x))
        np.testing.assert_allclose(coefficients @ stacked, vertex_engine.q_eval(n, x), rtol=1e-11, atol=1e-11)


@pytest.mark.order(6)
@pytest.mark.parametrize("engine_name", ["vertex_engine", "sobolev_engine", "coupled_engine"])
def test_kernel_decompositions(request, engine_name, triangle_points):
    """
    Checking K_n(nu) as the sum of projection kernels and as the sum of orthonormal Q blocks
    """
    engine = request.getfixturevalue(engine_name)
    for x in triangle_points:
        for y in triangle_points[:3]:
            projections = 0.0
            orthonormal = 0.0
            for n in range(7):
                projections += engine.modified_projection_kernel(n, x, y)
                orthonormal += float(engine.orthonormal_q_eval(n, x) @ engine.orthonormal_q_eval(n, y))
                reference = engine.modified_sum_kernel(n, x, y)
                scale = max(1.0, abs(reference))
                assert abs(projections - reference) <= 1e-10 * scale
                assert abs(orthonormal - reference) <= 1e-9 * scale


@pytest.mark.order(7)
def test_masses_lower_the_kernel(vertex_engine, coupled_engine, triangle_points):
    """
    Checking K_n(nu; x, x) <= K_n(mu; x, x) and the Christoffel function as its reciprocal
    """
    for engine in (vertex_engine, coupled_engine):
        for x in triangle_points:
            for n in range(7):
                modified = engine.modified_sum_kernel(n, x, x)
                assert 0.0 < modified <= engine.base_kernel(n, x, x) * (1.0 + 1e-12)
                assert engine.christoffel(n, x) == pytest.approx(1.0 / modified, rel=1e-14)


@pytest.mark.order(8)
def test_zero_mass_reduces_to_base(triangle_basis):
    """
    Checking that a zero mass matrix leaves the kernels and polynomials unchanged
    """
    engine = UvarovEngine(provider=triangle_basis, mass=MassSpec.uniform([[0.2, 0.2], [0.5, 0.5]], 0.0))
    x, y = [0.1, 0.6], [0.3, 0.3]
    for n in range(6):
        assert engine.modified_sum_kernel(n, x, y) == pytest.approx(engine.base_kernel(n, x, y), rel=1e-14)
        assert engine.modified_projection_kernel(n, x, y) == pytest.approx(
            engine.base_kernel(n, x, y, cumulative=False), rel=1e-13, abs=1e-14)
        np.testing.assert_allclose(engine.q_eval(n, x), triangle_basis.evaluate(n, x))


@pytest.mark.order(9)
def test_kernel_vector(sobolev_engine, triangle_basis):
    """
    Checking K_{-1}(xi, x) = 0 and the derivative functionals in the first slot of the kernel vector
    """
    x = [0.3, 0.2]
    np.testing.assert_array_equal(sobolev_engine.kernel_vector(-1, x), np.zeros(2))
    for n in range(4):
        expected = np.zeros(2)
        for j in range(n + 1):
            values = triangle_basis.evaluate(j, x)
            for i, point in enumerate(sobolev_engine.mass.points):
                expected[i] += float(triangle_basis.derivative(j, MultiIndex((1, 0)), point) @ values)
        np.testing.assert_allclose(sobolev_engine.kernel_vector(n, x), expected, rtol=1e-11, atol=1e-11)


@pytest.mark.order(10)
def test_concurrent_chain_extension(skew_basis):
    """
    Checking that concurrent requests build one consistent state chain
    """
    engine = UvarovEngine(provider=skew_basis, mass=MassSpec.uniform([[0.2, 0.3], [0.6, 0.1]], 1.5))
    with ThreadPoolExecutor(max_workers=4) as executor:
        states = list(executor.map(engine.build_state, [6, 3, 5, 6, 1, 4]))
    assert [state.n for state in states] == [6, 3, 5, 6, 1, 4]
    assert states[0] is states[3]
    reference = UvarovEngine(provider=skew_basis, mass=engine.mass)
    for n in range(7):
        np.testing.assert_array_equal(engine.build_state(n).K_mat, reference.build_state(n).K_mat)


@pytest.mark.order(11)
def test_zero_derivative_orders_match_plain_mode(triangle_basis):
    """
    Checking that explicit zero derivative orders give bit-identical results to plain point masses
    """
    points = [[0.2, 0.3], [0.6, 0.1]]
    plain = UvarovEngine(provider=triangle_basis, mass=MassSpec.uniform(points, 2.0))
    zeros = UvarovEngine(provider=triangle_basis, mass=MassSpec.uniform(points, 2.0, deriv_orders=[(0, 0), (0, 0)]))
    assert zeros.mass.is_plain
    x, y = [0.1, 0.6], [0.3, 0.3]
    for n in range(6):
        np.testing.assert_array_equal(zeros.build_state(n).K_mat, plain.build_state(n).K_mat)
        np.testing.assert_array_equal(zeros.q_eval(n, x), plain.q_eval(n, x))
        assert zeros.modified_sum_kernel(n, x, y) == plain.modified_sum_kernel(n, x, y)
