"""
Tests for the reproducing kernels of the simplex Jacobi weight.
"""
import gc
import math
import weakref
import numpy as np
import pytest
from uvarov import (
    BasisSpec,
    KernelMethod,
    Normalization,
    QuadratureOrderTooSmall,
    SimplexJacobiParams,
    christoffel,
    kernel_integral_form,
    kernel_sum_eval,
    kernel_vertex_closed_form,
    vertex_constants,
)
from uvarov.constants import CALIBRATION_CACHE_SIZE
from uvarov.exceptions import InvalidParameters
from uvarov.kernels import closed_form_calibration, kernel_sum_diagonal, projection_kernel_integral_form
from uvarov.simplex_basis import simplex_vertex

KERNEL_POINTS = {
    1: [[0.0], [0.3], [0.75], [1.0]],
    2: [[1.0 / 3.0, 1.0 / 3.0], [0.2, 0.5], [0.5, 0.5], [0.0, 0.0], [0.0, 0.7]],
    3: [[0.25, 0.25, 0.25], [0.1, 0.2, 0.3], [0.5, 0.0, 0.5], [0.0, 0.0, 1.0]],
}


@pytest.mark.order(1)
def test_chebyshev_kernel_at_endpoint(chebyshev_basis):
    """
    Checking K_n(1, 1) = 2n + 1 for d = 1, kappa = 0
    """
    for n in range(12):
        value = kernel_sum_eval(chebyshev_basis, n, [1.0], [1.0])
        assert value.method is KernelMethod.BASIS_SUM
        assert float(value) == pytest.approx(2 * n + 1, rel=1e-13)
    assert christoffel(chebyshev_basis, 4, [1.0]) == pytest.approx(1.0 / 9.0, rel=1e-13)


@pytest.mark.order(2)
@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("sigma", [0.0, 0.5, 1.5])
def test_vertex_closed_form_matches_basis_sum(d, sigma):
    """
    Checking the calibrated vertex closed form against the basis sum on interior, face and vertex points
    """
    spec = BasisSpec(params=SimplexJacobiParams.symmetric(d, sigma), max_degree=40)
    degrees = [0, 1, 2, 5, 10, 20, 30, 40]
    for i in range(1, d + 2):
        vertex = simplex_vertex(d, i)
        for x in KERNEL_POINTS[d]:
            for n in degrees:
                reference = kernel_sum_eval(spec, n, x, vertex).value
                scale = math.sqrt(kernel_sum_eval(spec, n, x, x).value * kernel_sum_eval(spec, n, vertex, vertex).value)
                closed = kernel_vertex_closed_form(spec, n, x, i)
                assert closed.method is KernelMethod.CLOSED_FORM
                assert abs(closed.value - reference) <= 1e-10 * scale


@pytest.mark.order(3)
@pytest.mark.parametrize("d", [1, 2, 3])
def test_calibration_factor(d):
    """
    Checking that the printed closed forms are off by the factor 2^(d+1)
    """
    spec = BasisSpec(params=SimplexJacobiParams.symmetric(d, 0.5), max_degree=3)
    assert closed_form_calibration(spec) == pytest.approx(2.0 ** (d + 1), rel=1e-12)
    printed = kernel_vertex_closed_form(spec, 2, [0.0] * d, d + 1, Normalization.AS_PRINTED)
    calibrated = kernel_vertex_closed_form(spec, 2, [0.0] * d, d + 1)
    assert printed.calibration == 1.0
    assert calibrated.value == pytest.approx(2.0 ** (d + 1) * printed.value, rel=1e-14)


@pytest.mark.order(4)
def test_vertex_constants(chebyshev_basis, triangle_basis):
    """
    Checking A_n = K_n(e_i, e_i), B_n = K_n(e_i, e_j) and the known d = 1 values
    """
    constants = vertex_constants(chebyshev_basis, 3)
    assert constants.A == pytest.approx(7.0, rel=1e-14)
    assert constants.B == pytest.approx(-1.0, rel=1e-14)
    assert constants.C == pytest.approx(3.2, rel=1e-14)
    assert vertex_constants(chebyshev_basis, 3, Normalization.AS_PRINTED).A == pytest.approx(7.0 / 4.0, rel=1e-14)
    e1, e2 = simplex_vertex(2, 1), simplex_vertex(2, 2)
    for n in (0, 1, 4, 9):
        constants = vertex_constants(triangle_basis, n)
        assert constants.A == pytest.approx(kernel_sum_eval(triangle_basis, n, e1, e1).value, rel=1e-11)
        assert constants.B == pytest.approx(kernel_sum_eval(triangle_basis, n, e1, e2).value, rel=1e-10, abs=1e-10)


@pytest.mark.order(5)
def test_vertex_constants_need_symmetry(skew_basis):
    """
    Checking that vertex constants are refused for distinct kappa entries
    """
    with pytest.raises(InvalidParameters):
        vertex_constants(skew_basis, 2)
    with pytest.raises(InvalidParameters):
        kernel_vertex_closed_form(skew_basis, 2, [0.2, 0.2], 4)


@pytest.mark.order(6)
def test_closed_form_for_distinct_kappa(skew_basis):
    """
    Checking the vertex closed form of a non-symmetric weight against the basis sum
    """
    for i in range(1, 4):
        vertex = simplex_vertex(2, i)
        for x in KERNEL_POINTS[2]:
            for n in range(7):
                reference = kernel_sum_eval(skew_basis, n, x, vertex).value
                assert kernel_vertex_closed_form(skew_basis, n, x, i).value == pytest.approx(
                    reference, rel=1e-10, abs=1e-10)


@pytest.mark.order(7)
@pytest.mark.parametrize("fixture_name", ["skew_basis", "tetrahedron_basis", "chebyshev_basis"])
def test_integral_form_matches_basis_sum(request, fixture_name):
    """
    Checking the Gegenbauer integral representation, including zero kappa entries and face points
    """
    spec = request.getfixturevalue(fixture_name)
    points = KERNEL_POINTS[spec.d]
    for x in points:
        for y in points:
            for n in range(min(spec.max_degree, 6) + 1):
                reference = kernel_sum_eval(spec, n, x, y).value
                value = kernel_integral_form(spec, n, x, y)
                assert value.method is KernelMethod.INTEGRAL_FORM
                assert value.value == pytest.approx(reference, rel=1e-8, abs=1e-8)


@pytest.mark.order(8)
@pytest.mark.parametrize("sigma", [0.5, 1.0])
def test_symmetric_integral_form_on_triangle(sigma):
    """
    Checking the integral representation for a symmetric triangle weight through degree 10
    """
    spec = BasisSpec(params=SimplexJacobiParams.symmetric(2, sigma), max_degree=10)
    points = KERNEL_POINTS[2]
    for x in points:
        for y in points:
            for n in range(11):
                reference = kernel_sum_eval(spec, n, x, y).value
                assert kernel_integral_form(spec, n, x, y).value == pytest.approx(reference, rel=1e-8, abs=1e-8)


@pytest.mark.order(9)
def test_projection_integral_form(skew_basis):
    """
    Checking P_n(x, y) = K_n(x, y) - K_{n-1}(x, y) from the integral representation
    """
    x, y = [0.2, 0.5], [0.1, 0.1]
    for n in range(5):
        reference = kernel_sum_eval(skew_basis, n, x, y, cumulative=False)
        value = projection_kernel_integral_form(skew_basis, n, x, y)
        assert not value.cumulative and not reference.cumulative
        assert value.value == pytest.approx(reference.value, rel=1e-8, abs=1e-8)


@pytest.mark.order(10)
def test_quadrature_order_too_small(skew_basis):
    """
    Checking that a rule with fewer than n + 1 points is rejected
    """
    with pytest.raises(QuadratureOrderTooSmall):
        kernel_integral_form(skew_basis, 5, [0.2, 0.2], [0.3, 0.3], quadrature_order=3)
    exact = kernel_integral_form(skew_basis, 5, [0.2, 0.2], [0.3, 0.3], quadrature_order=6)
    assert exact.value == pytest.approx(kernel_sum_eval(skew_basis, 5, [0.2, 0.2], [0.3, 0.3]).value, rel=1e-8)


@pytest.mark.order(11)
def test_quadrature_grid_limit(tetrahedron_basis):
    """
    Checking that a tensor grid above the node limit is refused before it is allocated
    """
    x, y = [0.1, 0.2, 0.3], [0.25, 0.25, 0.25]
    with pytest.raises(InvalidParameters):
        kernel_integral_form(tetrahedron_basis, 100, x, y)
    with pytest.raises(InvalidParameters):
        kernel_integral_form(tetrahedron_basis, 2, x, y, quadrature_order=50)
    # zero scales at a vertex collapse their axes
    vertex = simplex_vertex(3, 1)
    value = kernel_integral_form(tetrahedron_basis, 2, vertex, vertex, quadrature_order=50)
    assert value.value == pytest.approx(kernel_sum_eval(tetrahedron_basis, 2, vertex, vertex).value, rel=1e-8)


@pytest.mark.order(12)
@pytest.mark.parametrize("d", [1, 2, 3])
def test_calibration_cache_is_bounded(d):
    """
    Checking that calibrated bases are released once enough other bases have been calibrated
    """
    spec = BasisSpec(params=SimplexJacobiParams.symmetric(d, 0.25), max_degree=1)
    reference = weakref.ref(spec)
    assert closed_form_calibration(spec) == pytest.approx(2.0 ** (d + 1), rel=1e-12)
    del spec
    for k in range(CALIBRATION_CACHE_SIZE + 1):
        closed_form_calibration(BasisSpec(params=SimplexJacobiParams.symmetric(d, 0.3 + k / 10.0), max_degree=1))
    gc.collect()
    assert reference() is None


@pytest.mark.order(13)
def test_diagonal_kernels_and_christoffel(triangle_basis):
    """
    Checking the cumulative diagonal and the Christoffel function of the base weight
    """
    x = np.array([0.2, 0.5])
    diagonal = kernel_sum_diagonal(triangle_basis, 6, x)
    assert np.all(np.diff(diagonal) > 0.0)
    for n in range(7):
        assert diagonal[n] == pytest.approx(kernel_sum_eval(triangle_basis, n, x, x).value, rel=1e-13)
        assert christoffel(triangle_basis, n, x) == pytest.approx(1.0 / diagonal[n], rel=1e-13)
