"""
Tests for the orthonormal Jacobi basis on the simplex and its moments.
"""
import math
import numpy as np
import pytest
from uvarov import (
    BasisSpec,
    DerivativeOrderNotSupported,
    InvalidDimension,
    InvalidParameters,
    MonomialCeilingExceeded,
    MultiIndex,
    PointOutsideSimplex,
    SimplexJacobiParams,
    basis_eval,
    basis_partial_deriv,
)
from uvarov.polycore import graded_monomials
from uvarov.simplex_basis import barycentric, moment, moment_matrix, simplex_vertex, validate_point


@pytest.mark.order(1)
def test_weight_parameters():
    """
    Checking lambda, the normalization constant and the symmetric constructor
    """
    params = SimplexJacobiParams.symmetric(2, 0.0)
    assert params.lam == 1.5
    assert params.is_symmetric and params.sigma == 0.0
    assert SimplexJacobiParams(1, (0.0, 0.0)).w_norm == pytest.approx(1.0 / math.pi, rel=1e-14)
    with pytest.raises(InvalidDimension):
        SimplexJacobiParams(2, (0.0, 0.0))
    with pytest.raises(InvalidParameters):
        SimplexJacobiParams(1, (-0.5, 0.0))
    with pytest.raises(InvalidParameters):
        _ = SimplexJacobiParams(2, (0.5, 1.0, 0.0)).sigma


@pytest.mark.order(2)
def test_moments():
    """
    Checking normalized Dirichlet moments of the triangle weight with kappa = 0
    """
    params = SimplexJacobiParams.symmetric(2, 0.0)
    assert moment(params, MultiIndex((0, 0))) == 1.0
    assert moment(params, MultiIndex((1, 0))) == pytest.approx(1.0 / 3.0, rel=1e-15)
    assert moment(params, MultiIndex((1, 1))) == pytest.approx(1.0 / 15.0, rel=1e-15)
    assert moment(params, MultiIndex((2, 0))) == pytest.approx(0.2, rel=1e-15)
    with pytest.raises(InvalidDimension):
        moment(params, MultiIndex((1, 0, 0)))


@pytest.mark.order(3)
def test_chebyshev_case(chebyshev_basis):
    """
    Checking that d = 1, kappa = 0 gives sqrt(2) T_n(2x - 1)
    """
    assert chebyshev_basis.evaluate(0, [0.3])[0] == pytest.approx(1.0, rel=1e-15)
    assert chebyshev_basis.evaluate(1, [1.0])[0] == pytest.approx(math.sqrt(2.0), rel=1e-14)
    assert chebyshev_basis.evaluate(3, [0.25])[0] == pytest.approx(math.sqrt(2.0), rel=1e-13)
    for n in range(1, 13):
        value = basis_eval(chebyshev_basis, n, [0.8])[0]
        assert value == pytest.approx(math.sqrt(2.0) * math.cos(n * math.acos(0.6)), abs=1e-12)


@pytest.mark.order(4)
@pytest.mark.parametrize("fixture_name, degree", [
    ("triangle_basis", 5), ("skew_basis", 5), ("tetrahedron_basis", 4),
])
def test_gram_matrix_is_identity(request, fixture_name, degree):
    """
    Checking orthonormality of the basis through its monomial coefficients and the exact moments
    """
    spec = request.getfixturevalue(fixture_name)
    coefficients = spec.coefficient_matrix(degree)
    gram = coefficients @ moment_matrix(spec.params, graded_monomials(spec.d, degree)) @ coefficients.T
    np.testing.assert_allclose(gram, np.eye(gram.shape[0]), atol=1e-8)


@pytest.mark.order(5)
def test_block_layout(tetrahedron_basis):
    """
    Checking block lengths and that evaluate_all agrees with evaluate degree by degree
    """
    x = [0.1, 0.2, 0.3]
    blocks = tetrahedron_basis.evaluate_all(6, x)
    assert [len(block) for block in blocks] == [math.comb(j + 2, j) for j in range(7)]
    for j, block in enumerate(blocks):
        np.testing.assert_allclose(block, tetrahedron_basis.evaluate(j, x), rtol=1e-14)
    assert tetrahedron_basis.dims(4) == 15


@pytest.mark.order(6)
def test_monomial_form_agrees_with_recurrence(skew_basis):
    """
    Checking that the monomial conversion reproduces the direct evaluation
    """
    x = [0.15, 0.6]
    for n in range(6):
        direct = skew_basis.evaluate(n, x)
        converted = np.array([poly.evaluate(x) for poly in skew_basis.as_monomials(n)])
        np.testing.assert_allclose(converted, direct, rtol=1e-9, atol=1e-11)


@pytest.mark.order(7)
def test_face_continuity(triangle_basis):
    """
    Checking that values on edges and vertices are limits of interior values
    """
    for point, nearby in (([0.5, 0.5], [0.5, 0.5 - 1e-10]), ([0.0, 0.0], [1e-11, 1e-11]),
                          ([0.0, 0.4], [1e-11, 0.4]), ([1.0, 0.0], [1.0 - 1e-11, 0.0])):
        for n in range(8):
            exact = triangle_basis.evaluate(n, point)
            assert np.all(np.isfinite(exact))
            np.testing.assert_allclose(exact, triangle_basis.evaluate(n, nearby), rtol=1e-6, atol=1e-6)


@pytest.mark.order(8)
def test_derivatives_against_finite_differences(skew_basis):
    """
    Checking first and mixed second derivatives against central differences
    """
    x = np.array([0.2, 0.3])
    step = 1e-5
    e1, e2 = np.array([step, 0.0]), np.array([0.0, step])
    for n in range(1, 6):
        dx1 = basis_partial_deriv(skew_basis, n, MultiIndex((1, 0)), x)
        central = (skew_basis.evaluate(n, x + e1) - skew_basis.evaluate(n, x - e1)) / (2 * step)
        np.testing.assert_allclose(dx1, central, rtol=1e-6, atol=1e-6)
        mixed = skew_basis.derivative(n, MultiIndex((1, 1)), x)
        second = (skew_basis.evaluate(n, x + e1 + e2) - skew_basis.evaluate(n, x + e1 - e2)
                  - skew_basis.evaluate(n, x - e1 + e2) + skew_basis.evaluate(n, x - e1 - e2)) / (4 * step ** 2)
        np.testing.assert_allclose(mixed, second, rtol=1e-4, atol=1e-3)
    np.testing.assert_array_equal(skew_basis.derivative(2, MultiIndex((0, 0)), x), skew_basis.evaluate(2, x))
    np.testing.assert_array_equal(skew_basis.derivative(1, MultiIndex((2, 0)), x), np.zeros(2))


@pytest.mark.order(9)
def test_basis_errors(triangle_basis):
    """
    Checking rejected derivative orders, degrees, points and vertex indices
    """
    with pytest.raises(DerivativeOrderNotSupported):
        triangle_basis.derivative(3, MultiIndex((2, 1)), [0.2, 0.2])
    with pytest.raises(InvalidDimension):
        triangle_basis.evaluate(11, [0.2, 0.2])
    with pytest.raises(PointOutsideSimplex):
        triangle_basis.evaluate(1, [0.7, 0.6])
    with pytest.raises(PointOutsideSimplex):
        validate_point([-0.01, 0.5], 2)
    with pytest.raises(InvalidDimension):
        validate_point([0.2, 0.2, 0.2], 2)
    with pytest.raises(InvalidParameters):
        simplex_vertex(2, 4)
    with pytest.raises(InvalidParameters):
        BasisSpec(params=SimplexJacobiParams.symmetric(2, 0.0), max_degree=-1)
    high = BasisSpec(params=SimplexJacobiParams.symmetric(1, 0.5), max_degree=21)
    with pytest.raises(MonomialCeilingExceeded):
        high.as_monomials(21)


@pytest.mark.order(10)
def test_vertex_helpers():
    """
    Checking vertex coordinates and barycentric completion
    """
    np.testing.assert_array_equal(simplex_vertex(3, 2), [0.0, 1.0, 0.0])
    np.testing.assert_array_equal(simplex_vertex(3, 4), [0.0, 0.0, 0.0])
    np.testing.assert_allclose(barycentric([0.25, 0.5]), [0.25, 0.5, 0.25])
    assert validate_point([1.0 + 1e-13, 0.0], 2)[0] == pytest.approx(1.0)
