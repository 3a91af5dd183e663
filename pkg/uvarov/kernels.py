"""
This module evaluates reproducing kernels of the simplex Jacobi weight:
basis sums, closed forms at the vertices, the Gegenbauer integral representation
and the Christoffel function.
"""
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
import numpy as np
from scipy.special import roots_jacobi
from logger import log
from .constants import CALIBRATION_CACHE_SIZE, CALIBRATION_TOLERANCE, MAX_QUADRATURE_NODES, QUADRATURE_PADDING
from .exceptions import CalibrationMismatch, InvalidParameters, QuadratureOrderTooSmall
from .jacobi1d import GegenbauerParams, JacobiParams, gegenbauer_eval, jacobi_eval, pochhammer_ratio
from .simplex_basis import BasisSpec, barycentric, simplex_vertex, validate_point


class KernelMethod(str, Enum):
    """How a kernel value was obtained."""
    BASIS_SUM = "basis_sum"
    CLOSED_FORM = "closed_form"
    INTEGRAL_FORM = "integral_form"


class Normalization(str, Enum):
    """Scaling of the closed-form kernels: as printed, or rescaled so that K_0 = 1."""
    AS_PRINTED = "as_printed"
    CALIBRATED = "calibrated"


@dataclass(frozen=True)
class KernelValue:
    """
    One kernel evaluation.

    Attributes:
        n (int): The degree.
        x (tuple): First point.
        y (tuple): Second point.
        value (float): K_n(x, y), or P_n(x, y) when cumulative is False.
        method (KernelMethod): How the value was obtained.
        cumulative (bool): Whether the value is the sum kernel K_n.
        calibration (float): Factor applied to the printed closed form; 1 for basis sums.
    """
    n: int
    x: tuple
    y: tuple
    value: float
    method: KernelMethod
    cumulative: bool = True
    calibration: float = 1.0

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class VertexConstants:
    """
    Vertex kernel constants of a symmetric weight kappa_i = sigma:
    A = K_n(e_i, e_i), B = K_n(e_i, e_j) for i != j, and C = (lambda)_n / (sigma + 1/2)_n,
    the prefactor of the vertex closed form.
    """
    # pylint: disable=invalid-name
    n: int
    A: float
    B: float
    C: float
    normalization: Normalization


def kernel_sum_eval(spec: BasisSpec, n: int, x, y, cumulative: bool = True) -> KernelValue:
    """
    Kernel from the orthonormal basis: K_n(x, y) = sum_{j <= n} P_j(x) . P_j(y),
    or the single-degree P_n(x, y) = P_n(x) . P_n(y) when cumulative is False.

    Args:
        :param spec (BasisSpec): The basis.
        :param n (int): The degree.
        :param x (array-like): First point of T^d.
        :param y (array-like): Second point of T^d.
        :param cumulative (bool): Sum kernel or projection kernel.

    Returns:
        (KernelValue): The value with method basis_sum.

    Examples:
        >>> spec = BasisSpec(params=SimplexJacobiParams(1, (0.0, 0.0)), max_degree=5)
        >>> kernel_sum_eval(spec, 5, [1.0], [1.0]).value
        11.0
    """
    bx = spec.evaluate_all(n, x)
    by = spec.evaluate_all(n, y)
    if cumulative:
        value = math.fsum(float(u @ v) for u, v in zip(bx, by))
    else:
        value = float(bx[n] @ by[n])
    return KernelValue(n=n, x=tuple(map(float, x)), y=tuple(map(float, y)), value=value,
                       method=KernelMethod.BASIS_SUM, cumulative=cumulative)


def kernel_sum_diagonal(spec: BasisSpec, n: int, x) -> np.ndarray:
    """K_j(x, x) for j = 0..n from one pass over the basis."""
    blocks = spec.evaluate_all(n, x)
    return np.cumsum([float(block @ block) for block in blocks])


def _printed_vertex_kernel(spec: BasisSpec, n: int, bary: np.ndarray, i: int) -> float:
    params = spec.params
    kappa_i = params.kappa[i - 1]
    jacobi = JacobiParams(params.lam - kappa_i - 0.5, kappa_i - 0.5)
    prefactor = pochhammer_ratio(params.lam, kappa_i + 0.5, n) / 2.0 ** (params.d + 1)
    return prefactor * float(jacobi_eval(jacobi, n, 2.0 * bary[i - 1] - 1.0))


@lru_cache(maxsize=CALIBRATION_CACHE_SIZE)
def closed_form_calibration(spec: BasisSpec) -> float:
    """
    Factor that makes the printed closed forms agree with the basis-sum kernel, fixed by K_0 = 1.

    The factor is expected to be 2^{d+1}; it is also confirmed at degree 1 on a vertex.

    Raises:
        CalibrationMismatch: If the factor is not 2^{d+1} or the degree-1 check fails.
    """
    d = spec.d
    centre = np.full(d, 1.0 / (d + 1))
    printed = _printed_vertex_kernel(spec, 0, barycentric(centre), 1)
    factor = kernel_sum_eval(spec, 0, centre, centre).value / printed
    expected = 2.0 ** (d + 1)
    if abs(factor - expected) > 1e-10 * expected:
        log.error('[Uvarov.Kernels]: calibration factor %.17g differs from %s', factor, expected)
        raise CalibrationMismatch(f"Calibration factor {factor:.17g} differs from 2^(d+1) = {expected}")
    if spec.max_degree >= 1:
        vertex = simplex_vertex(d, 1)
        reference = kernel_sum_eval(spec, 1, vertex, vertex).value
        closed = factor * _printed_vertex_kernel(spec, 1, barycentric(vertex), 1)
        if abs(closed - reference) > CALIBRATION_TOLERANCE * abs(reference):
            log.error('[Uvarov.Kernels]: calibrated closed form %.17g differs from basis sum %.17g', closed, reference)
            raise CalibrationMismatch(
                f"Calibrated vertex kernel {closed:.17g} differs from the basis sum {reference:.17g} at degree 1"
            )
    log.info('[Uvarov.Kernels]: closed-form calibration factor fixed at %.17g for d=%s kappa=%s',
             factor, d, spec.params.kappa)
    return factor


def kernel_vertex_closed_form(spec: BasisSpec, n: int, x, i: int,
                              normalization: Normalization = Normalization.CALIBRATED) -> KernelValue:
    """
    Closed form of K_n(x, e_i) = (lambda)_n / (kappa_i + 1/2)_n P_n^{(lambda-kappa_i-1/2, kappa_i-1/2)}(2 x_i - 1),
    with x_{d+1} = 1 - |x|. The printed form carries an extra 2^{-(d+1)}.

    Args:
        :param spec (BasisSpec): The basis, providing the weight and the calibration.
        :param n (int): The degree.
        :param x (array-like): Point of T^d.
        :param i (int): Vertex index, 1 <= i <= d + 1.
        :param normalization (Normalization): Calibrated (default) or as printed.

    Returns:
        (KernelValue): The value with method closed_form.

    Raises:
        InvalidParameters: If i is out of range.
    """
    d = spec.d
    vertex = simplex_vertex(d, i)
    point = validate_point(x, d)
    printed = _printed_vertex_kernel(spec, n, barycentric(point), i)
    factor = closed_form_calibration(spec) if Normalization(normalization) is Normalization.CALIBRATED else 1.0
    return KernelValue(n=n, x=tuple(point.tolist()), y=tuple(vertex.tolist()), value=factor * printed,
                       method=KernelMethod.CLOSED_FORM, calibration=factor)


def vertex_constants(spec: BasisSpec, n: int,
                     normalization: Normalization = Normalization.CALIBRATED) -> VertexConstants:
    """
    Constants A_n, B_n and C_n of a symmetric weight kappa_i = sigma.

    Calibrated values are A_n = (lambda)_n/n! (lambda-sigma+1/2)_n/(sigma+1/2)_n, B_n = (-1)^n (lambda)_n/n!
    and C_n = (lambda)_n/(sigma+1/2)_n; the printed values carry an extra 2^{-(d+1)}.

    Raises:
        InvalidParameters: If kappa is not symmetric.

    Examples:
        >>> spec = BasisSpec(params=SimplexJacobiParams(1, (0.0, 0.0)), max_degree=3)
        >>> vertex_constants(spec, 3).B
        -1.0
    """
    params = spec.params
    if not params.is_symmetric:
        log.error('[Uvarov.Kernels]: vertex constants need a symmetric kappa, got %s', params.kappa)
        raise InvalidParameters(f"Vertex constants need equal kappa entries, got {params.kappa}")
    sigma = params.sigma
    lam = params.lam
    printed_scale = 2.0 ** -(params.d + 1)
    if Normalization(normalization) is Normalization.CALIBRATED:
        printed_scale *= closed_form_calibration(spec)
    growth = pochhammer_ratio(lam, 1.0, n)
    return VertexConstants(
        n=n,
        A=printed_scale * growth * pochhammer_ratio(lam - sigma + 0.5, sigma + 0.5, n),
        B=printed_scale * (-1.0) ** n * growth,
        C=printed_scale * pochhammer_ratio(lam, sigma + 0.5, n),
        normalization=Normalization(normalization),
    )


@lru_cache(maxsize=None)
def _axis_rule(kappa_j: float, order: int) -> tuple:
    """Probability-normalized Gauss-Jacobi rule for (1-t^2)^{kappa_j-1}; kappa_j = 0 averages the endpoints."""
    if kappa_j == 0.0:
        nodes, weights = np.array([-1.0, 1.0]), np.array([0.5, 0.5])
    else:
        nodes, weights = roots_jacobi(order, kappa_j - 1.0, kappa_j - 1.0)
        weights = weights / weights.sum()
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def _integral_expectation(spec: BasisSpec, n: int, x, y, order: int) -> float:
    d = spec.d
    bx = barycentric(validate_point(x, d))
    by = barycentric(validate_point(y, d))
    scales = np.sqrt(np.clip(bx * by, 0.0, None))
    nodes_total = math.prod(2 if kappa_j == 0.0 else order
                            for kappa_j, scale in zip(spec.params.kappa, scales) if scale != 0.0)
    if nodes_total > MAX_QUADRATURE_NODES:
        log.error('[Uvarov.Kernels]: quadrature grid of %s nodes for degree %s exceeds %s',
                  nodes_total, n, MAX_QUADRATURE_NODES)
        raise InvalidParameters(
            f"Integral form at degree {n} needs {nodes_total} quadrature nodes, above the limit {MAX_QUADRATURE_NODES}"
        )
    arguments = np.zeros(1)
    weights = np.ones(1)
    for kappa_j, scale in zip(spec.params.kappa, scales):
        # axes with a zero coefficient integrate to one
        if scale == 0.0:
            continue
        nodes, axis_weights = _axis_rule(kappa_j, order)
        arguments = np.add.outer(arguments, scale * nodes).reshape(-1)
        weights = np.multiply.outer(weights, axis_weights).reshape(-1)
    values = gegenbauer_eval(GegenbauerParams(spec.params.lam), 2 * n, arguments)
    return float(np.dot(weights, values))


def kernel_integral_form(spec: BasisSpec, n: int, x, y, quadrature_order: int = None,
                         normalization: Normalization = Normalization.CALIBRATED) -> KernelValue:
    """
    K_n(x, y) from its Gegenbauer integral representation
    2^{-(d+1)} integral of C^lambda_{2n}(sum_j sqrt(x_j y_j) t_j) prod_j (1-t_j^2)^{kappa_j-1} dt
    with each axis measure normalized to total mass one.

    Tensor-product Gauss-Jacobi rules with exponents kappa_j - 1 integrate the polynomial integrand exactly.
    For kappa_j = 0 the axis measure is replaced by the average of t_j = -1 and t_j = 1.

    Args:
        :param spec (BasisSpec): The basis, providing the weight and the calibration.
        :param n (int): The degree.
        :param x (array-like): First point.
        :param y (array-like): Second point.
        :param quadrature_order (int): Points per axis; defaults to 2n + 8.
        :param normalization (Normalization): Calibrated (default) or as printed.

    Returns:
        (KernelValue): The value with method integral_form and the calibration factor.

    Raises:
        QuadratureOrderTooSmall: If quadrature_order < n + 1.
        InvalidParameters: If the tensor grid would exceed MAX_QUADRATURE_NODES nodes.
    """
    order = 2 * n + QUADRATURE_PADDING if quadrature_order is None else int(quadrature_order)
    if order < n + 1:
        log.error('[Uvarov.Kernels]: quadrature order %s too small for degree %s', order, n)
        raise QuadratureOrderTooSmall(f"Quadrature order {order} is below n + 1 = {n + 1}")
    printed = _integral_expectation(spec, n, x, y, order) / 2.0 ** (spec.d + 1)
    factor = closed_form_calibration(spec) if Normalization(normalization) is Normalization.CALIBRATED else 1.0
    return KernelValue(n=n, x=tuple(map(float, x)), y=tuple(map(float, y)), value=factor * printed,
                       method=KernelMethod.INTEGRAL_FORM, calibration=factor)


def projection_kernel_integral_form(spec: BasisSpec, n: int, x, y, quadrature_order: int = None) -> KernelValue:
    """Single-degree P_n(x, y) = K_n(x, y) - K_{n-1}(x, y) from the integral representation."""
    current = kernel_integral_form(spec, n, x, y, quadrature_order)
    value = current.value
    if n > 0:
        order = 2 * n + QUADRATURE_PADDING if quadrature_order is None else quadrature_order
        value -= kernel_integral_form(spec, n - 1, x, y, order).value
    return KernelValue(n=n, x=current.x, y=current.y, value=value, method=KernelMethod.INTEGRAL_FORM,
                       cumulative=False, calibration=current.calibration)


def christoffel(spec: BasisSpec, n: int, x) -> float:
    """
    Christoffel function 1 / K_n(x, x) of the base weight.

    Examples:
        >>> spec = BasisSpec(params=SimplexJacobiParams(1, (0.0, 0.0)), max_degree=4)
        >>> round(christoffel(spec, 4, [1.0]), 12)
        0.111111111111
    """
    return 1.0 / kernel_sum_eval(spec, n, x, x).value
