"""
This module provides the orthonormal Jacobi basis on the simplex T^d,
its partial derivatives and the exact moments of the normalized Jacobi weight.
"""
import math
import threading
from dataclasses import dataclass, field
import numpy as np
from scipy.special import gammaln
from logger import log
from .constants import (
    CALIBRATION_CHECK_DEGREE,
    CALIBRATION_TOLERANCE,
    DOMAIN_TOLERANCE,
    MAX_DERIVATIVE_ORDER,
    MONOMIAL_DEGREE_CEILING,
)
from .exceptions import (
    CalibrationMismatch,
    DerivativeOrderNotSupported,
    InvalidDimension,
    InvalidParameters,
    MonomialCeilingExceeded,
    PointOutsideSimplex,
)
from .jacobi1d import homogeneous_recurrence, jacobi_log_norm_constant, jacobi_table
from .polycore import MonomialPoly, MultiIndex, enumerate_degree, graded_monomials
from .uvarov_engine import BasisProvider


@dataclass(frozen=True)
class SimplexJacobiParams:
    """
    The Jacobi weight W_kappa(x) = x_1^{k_1-1/2} ... x_d^{k_d-1/2} (1-|x|)^{k_{d+1}-1/2} on T^d.

    Attributes:
        d (int): Dimension, d >= 1.
        kappa (tuple): The d + 1 nonnegative exponents.
        lam (float): lambda = |kappa| + (d+1)/2.
        w_norm (float): The constant w_kappa with w_kappa * integral of W_kappa = 1.

    Raises:
        InvalidDimension: If d < 1 or kappa does not have d + 1 entries.
        InvalidParameters: If some kappa_i is negative or not finite.

    Examples:
        >>> SimplexJacobiParams(2, (0.0, 0.0, 0.0)).lam
        1.5
    """
    d: int
    kappa: tuple
    lam: float = field(init=False)
    w_norm: float = field(init=False)

    def __post_init__(self) -> None:
        if self.d < 1:
            log.error('[Uvarov.Basis]: invalid dimension %s', self.d)
            raise InvalidDimension(f"Dimension must be at least 1, got d={self.d}")
        kappa = tuple(float(k) for k in self.kappa)
        if len(kappa) != self.d + 1:
            raise InvalidDimension(f"kappa must have d + 1 = {self.d + 1} entries, got {len(kappa)}")
        if any(not math.isfinite(k) or k < 0.0 for k in kappa):
            log.error('[Uvarov.Basis]: invalid kappa %s', kappa)
            raise InvalidParameters(f"kappa_i must be finite and nonnegative, got {kappa}")
        lam = sum(kappa) + (self.d + 1) / 2.0
        object.__setattr__(self, 'kappa', kappa)
        object.__setattr__(self, 'lam', lam)
        object.__setattr__(self, 'w_norm', math.exp(self.log_w_norm))

    @classmethod
    def symmetric(cls, d: int, sigma: float) -> 'SimplexJacobiParams':
        """All d + 1 exponents equal to sigma."""
        return cls(d, (sigma,) * (d + 1))

    @property
    def log_w_norm(self) -> float:
        """log w_kappa = log Gamma(lambda) - sum log Gamma(kappa_i + 1/2)."""
        lam = sum(self.kappa) + (self.d + 1) / 2.0
        return float(gammaln(lam) - sum(gammaln(k + 0.5) for k in self.kappa))

    @property
    def is_symmetric(self) -> bool:
        """True when all exponents are equal."""
        return all(k == self.kappa[0] for k in self.kappa)

    @property
    def sigma(self) -> float:
        """The common exponent of a symmetric weight."""
        if not self.is_symmetric:
            raise InvalidParameters(f"kappa {self.kappa} is not symmetric")
        return self.kappa[0]


def validate_point(x, d: int) -> np.ndarray:
    """
    Convert x to a float vector and check that it lies in T^d up to the domain tolerance.

    Raises:
        InvalidDimension: If x does not have d coordinates.
        PointOutsideSimplex: If some barycentric coordinate is below -tolerance.
    """
    point = np.asarray(x, dtype=float).reshape(-1)
    if point.shape != (d,):
        raise InvalidDimension(f"Point must have {d} coordinates, got {point.shape[0]}")
    if not np.all(np.isfinite(point)):
        raise PointOutsideSimplex(f"Point {point.tolist()} is not finite")
    if point.min() < -DOMAIN_TOLERANCE or 1.0 - point.sum() < -DOMAIN_TOLERANCE:
        log.error('[Uvarov.Basis]: point %s is outside the simplex', point.tolist())
        raise PointOutsideSimplex(f"Point {point.tolist()} is outside the simplex T^{d}")
    return point


def barycentric(x) -> np.ndarray:
    """Append x_{d+1} = 1 - |x| to a Cartesian point."""
    point = np.asarray(x, dtype=float).reshape(-1)
    return np.append(point, 1.0 - point.sum())


def simplex_vertex(d: int, i: int) -> np.ndarray:
    """
    The vertex e_i of T^d for 1 <= i <= d + 1; e_{d+1} is the origin.

    Raises:
        InvalidParameters: If i is out of range.
    """
    if not 1 <= i <= d + 1:
        log.error('[Uvarov.Basis]: invalid vertex index %s for d=%s', i, d)
        raise InvalidParameters(f"Vertex index must be in 1..{d + 1}, got {i}")
    point = np.zeros(d)
    if i <= d:
        point[i - 1] = 1.0
    return point


def moment(params: SimplexJacobiParams, alpha: MultiIndex) -> float:
    """
    Normalized moment w_kappa * integral of x^alpha W_kappa over T^d,
    equal to prod_i (kappa_i + 1/2)_{alpha_i} / (lambda)_{|alpha|}.

    The numerator and denominator factors are paired one by one.

    Examples:
        >>> moment(SimplexJacobiParams(2, (0.0, 0.0, 0.0)), MultiIndex((1, 0)))
        0.3333333333333333
    """
    if alpha.d != params.d:
        raise InvalidDimension(f"Multi-index has dimension {alpha.d}, expected {params.d}")
    numerators = [params.kappa[i] + 0.5 + m for i, e in enumerate(alpha.exponents) for m in range(e)]
    value = 1.0
    for j, numerator in enumerate(numerators):
        value *= numerator / (params.lam + j)
    return value


def moment_matrix(params: SimplexJacobiParams, rows, cols=None) -> np.ndarray:
    """Matrix of moments of x^(alpha + beta) for alpha in rows and beta in cols."""
    cols = rows if cols is None else cols
    cache = {}
    matrix = np.empty((len(rows), len(cols)))
    for i, alpha in enumerate(rows):
        for j, beta in enumerate(cols):
            key = alpha + beta
            if key not in cache:
                cache[key] = moment(params, key)
            matrix[i, j] = cache[key]
    return matrix


@dataclass(frozen=True)
class _DegreeLayoutArrays:
    alphas: np.ndarray
    tails: np.ndarray
    log_scale: np.ndarray


class BasisSpec(BasisProvider):
    """
    Orthonormal basis of the simplex Jacobi weight up to a maximal degree.

    The element with index alpha of degree n is
    h_alpha^{-1} prod_j c_{alpha_j} H_{alpha_j}^{(a_j, b_j)}(2 x_j - s_{j-1}, s_{j-1}),
    where s_j = 1 - x_1 - ... - x_j, H_k(t, s) = s^k P_k(t / s) is the homogeneous Jacobi form,
    a_j = 2 |alpha^{j+1}| + |kappa^{j+1}| + (d-j-1)/2, b_j = kappa_j - 1/2 and c_k are the
    orthonormal Jacobi constants. The ratios of consecutive s_j cancel in this form, so faces of the
    simplex, where some s_j vanish, are evaluated by continuity without division.

    The normalization is cross-checked against exact moments at construction.

    Attributes:
        params (SimplexJacobiParams): The weight.
        max_degree (int): Highest degree evaluated.

    Methods:
        evaluate: The block P_n(x) in layout order.
        evaluate_all: The blocks P_0(x), ..., P_n(x) sharing one set of recurrence tables.
        derivative: The block d^alpha P_n(x).
        as_monomials: The degree-n block as MonomialPoly objects.

    Raises:
        InvalidParameters: If max_degree is negative.
        CalibrationMismatch: If the Gram matrix of low degrees deviates from the identity.

    Examples:
        >>> spec = BasisSpec(params=SimplexJacobiParams(1, (0.0, 0.0)), max_degree=3)
        >>> spec.evaluate(1, [1.0])
        array([1.41421356])
    """

    def __init__(self, params: SimplexJacobiParams = None, max_degree: int = None) -> None:
        if max_degree is None or int(max_degree) != max_degree or max_degree < 0:
            log.error('[Uvarov.Basis]: invalid max degree %s', max_degree)
            raise InvalidParameters(f"max_degree must be a nonnegative integer, got {max_degree}")
        self.params = params
        self._max_degree = int(max_degree)
        d = params.d
        kappa = params.kappa
        # |kappa^{j+1}| + (d-j-1)/2 for j = 1..d
        self._a_offsets = np.array([sum(kappa[j:]) + (d - j - 1) / 2.0 for j in range(1, d + 1)])
        self._b = np.array([kappa[j - 1] - 0.5 for j in range(1, d + 1)])
        self._layouts = [self._layout_arrays(n) for n in range(self._max_degree + 1)]
        self._monomial_cache = {}
        self._monomial_lock = threading.Lock()
        self._check_calibration()
        log.info('[Uvarov.Basis]: basis ready for d=%s kappa=%s up to degree %s', d, kappa, self._max_degree)

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def max_degree(self) -> int:
        return self._max_degree

    def dims(self, n: int) -> int:
        return len(enumerate_degree(self.d, n))

    def _a(self, tails):
        return 2.0 * tails + self._a_offsets

    def _layout_arrays(self, n: int) -> _DegreeLayoutArrays:
        d = self.d
        alphas = np.array([alpha.exponents for alpha in enumerate_degree(d, n).indices], dtype=int)
        # tails[:, j-1] = |alpha^{j+1}| = alpha_{j+1} + ... + alpha_d
        tails = np.cumsum(alphas[:, ::-1], axis=1)[:, ::-1] - alphas
        a = self._a(tails)
        b = np.broadcast_to(self._b, a.shape)
        log_h2 = (gammaln(self.params.lam) - sum(gammaln(k + 0.5) for k in self.params.kappa)
                  + np.sum(gammaln(a + 1.0) + gammaln(b + 1.0) - gammaln(a + b + 2.0), axis=1))
        log_c = np.sum(jacobi_log_norm_constant(a, b, alphas), axis=1)
        return _DegreeLayoutArrays(alphas=alphas, tails=tails, log_scale=log_c - 0.5 * log_h2)

    def _check_degree(self, n: int) -> None:
        if n < 0 or n > self._max_degree:
            log.error('[Uvarov.Basis]: degree %s outside 0..%s', n, self._max_degree)
            raise InvalidDimension(f"Degree must be in 0..{self._max_degree}, got {n}")

    def _factor_tables(self, point: np.ndarray, n: int) -> list:
        """
        For every axis j a table F[m, k] = H_k^{(a_j(m), b_j)}(2 x_j - s_{j-1}, s_{j-1}) with tail m, m + k <= n.
        """
        tails = np.arange(n + 1, dtype=float)
        tables = []
        s_prev = 1.0
        for j in range(self.d):
            t = 2.0 * point[j] - s_prev
            a = 2.0 * tails + self._a_offsets[j]
            # rows are tails, columns degrees
            tables.append(jacobi_table(a, self._b[j], n, t, s_prev).T)
            s_prev -= point[j]
        return tables

    def _block(self, n: int, tables: list) -> np.ndarray:
        layout = self._layouts[n]
        values = np.exp(layout.log_scale)
        for j, table in enumerate(tables):
            values = values * table[layout.tails[:, j], layout.alphas[:, j]]
        return values

    def evaluate(self, n: int, x) -> np.ndarray:
        """
        The block P_n(x), a vector of length r_n in graded reverse-lexicographic order.

        Raises:
            InvalidDimension: If n is out of range.
            PointOutsideSimplex: If x is off the simplex.
        """
        self._check_degree(n)
        point = validate_point(x, self.d)
        return self._block(n, self._factor_tables(point, n))

    def evaluate_all(self, n: int, x) -> list:
        self._check_degree(n)
        point = validate_point(x, self.d)
        tables = self._factor_tables(point, n)
        return [self._block(j, tables) for j in range(n + 1)]

    def as_monomials(self, n: int) -> tuple:
        """
        The degree-n block converted to MonomialPoly objects, cached per degree.

        Raises:
            MonomialCeilingExceeded: If n exceeds the monomial representation ceiling.
        """
        self._check_degree(n)
        if n > MONOMIAL_DEGREE_CEILING:
            log.error('[Uvarov.Basis]: degree %s beyond the monomial ceiling', n)
            raise MonomialCeilingExceeded(f"Degree {n} exceeds the monomial ceiling {MONOMIAL_DEGREE_CEILING}")
        with self._monomial_lock:
            if n not in self._monomial_cache:
                self._monomial_cache[n] = self._convert(n)
        return self._monomial_cache[n]

    def _convert(self, n: int) -> tuple:
        d = self.d
        variables = [MonomialPoly.variable(d, i) for i in range(1, d + 1)]
        s_prev = MonomialPoly.constant(d, 1.0)
        forms = []
        for j in range(d):
            t = variables[j] * 2.0 - s_prev
            per_tail = {}
            for m in range(n + 1):
                a = 2.0 * m + float(self._a_offsets[j])
                per_tail[m] = list(homogeneous_recurrence(a, float(self._b[j]), n - m, t, s_prev))
            forms.append(per_tail)
            s_prev = s_prev - variables[j]
        layout = self._layouts[n]
        polys = []
        for row, alpha in enumerate(layout.alphas):
            poly = MonomialPoly.constant(d, math.exp(layout.log_scale[row]))
            for j in range(d):
                poly = poly * forms[j][int(layout.tails[row, j])][int(alpha[j])]
            polys.append(poly)
        log.debug('[Uvarov.Basis]: converted degree %s to monomials', n)
        return tuple(polys)

    def derivative(self, n: int, alpha: MultiIndex, x) -> np.ndarray:
        """
        The block d^alpha P_n(x), by exact differentiation of the monomial form.

        Raises:
            DerivativeOrderNotSupported: If |alpha| exceeds the supported order.
            MonomialCeilingExceeded: If n exceeds the monomial representation ceiling.
        """
        if alpha.d != self.d:
            raise InvalidDimension(f"Derivative multi-index has dimension {alpha.d}, expected {self.d}")
        if alpha.degree == 0:
            return self.evaluate(n, x)
        if alpha.degree > MAX_DERIVATIVE_ORDER:
            log.error('[Uvarov.Basis]: derivative order %s is not supported', alpha.exponents)
            raise DerivativeOrderNotSupported(
                f"Derivative order |alpha|={alpha.degree} exceeds the supported maximum {MAX_DERIVATIVE_ORDER}"
            )
        point = validate_point(x, self.d)
        return np.array([poly.partial_derivative(alpha).evaluate(point) for poly in self.as_monomials(n)])

    def coefficient_matrix(self, n: int) -> np.ndarray:
        """Rows of monomial coefficients of all basis elements of degree <= n along graded_monomials(d, n)."""
        indices = graded_monomials(self.d, n)
        return np.array([poly.coefficient_vector(indices) for j in range(n + 1) for poly in self.as_monomials(j)])

    def _check_calibration(self) -> None:
        degree = min(CALIBRATION_CHECK_DEGREE, self._max_degree)
        coefficients = self.coefficient_matrix(degree)
        indices = graded_monomials(self.d, degree)
        gram = coefficients @ moment_matrix(self.params, indices) @ coefficients.T
        deviation = float(np.max(np.abs(gram - np.eye(gram.shape[0]))))
        log.debug('[Uvarov.Basis]: Gram deviation %.3g through degree %s', deviation, degree)
        if deviation > CALIBRATION_TOLERANCE:
            log.error('[Uvarov.Basis]: basis normalization mismatch %.3g', deviation)
            raise CalibrationMismatch(
                f"Gram matrix of the basis through degree {degree} deviates from the identity by {deviation:.3g}"
            )


def basis_eval(spec: BasisSpec, n: int, x) -> np.ndarray:
    """The block P_n(x) of the simplex basis."""
    return spec.evaluate(n, x)


def basis_partial_deriv(spec: BasisSpec, n: int, alpha: MultiIndex, x) -> np.ndarray:
    """The block d^alpha P_n(x) of the simplex basis."""
    return spec.derivative(n, alpha, x)
