"""
This module provides the brute-force ground truth of the package:
the modified inner product evaluated exactly on monomials, Gram-matrix orthonormalization,
oracle kernels and the verification reports comparing every other module against them.
"""
import math
import threading
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
import numpy as np
from scipy.linalg import LinAlgError, LinAlgWarning, cholesky, solve, solve_triangular
from logger import log
from .constants import (
    EXACT_ORACLE_MAX_MONOMIALS,
    MONOMIAL_DEGREE_CEILING,
    ORACLE_PIVOT_THRESHOLD,
    REPORT_HEADER,
    VERIFY_TOLERANCE,
)
from .exceptions import (
    CalibrationMismatch,
    FactorizationFailed,
    IndefiniteMassMatrix,
    InvalidParameters,
    MonomialCeilingExceeded,
)
from .kernels import kernel_integral_form, kernel_sum_eval, kernel_vertex_closed_form, vertex_constants
from .polycore import MonomialPoly, MultiIndex, enumerate_degree, graded_monomials
from .simplex_basis import BasisSpec, SimplexJacobiParams, moment, simplex_vertex, validate_point
from .simplex_mass import VertexMassModel, structured_inverse, vertex_mass_kernel, vertex_mass_q_eval
from .uvarov_engine import MassSpec, UvarovEngine

_HALF = Fraction(1, 2)


def _derivative_factor(beta: MultiIndex, alpha: MultiIndex) -> int:
    """Constant of d^alpha x^beta = factor * x^(beta - alpha); zero when some beta_i < alpha_i."""
    return math.prod(math.perm(b, a) for a, b in zip(alpha.exponents, beta.exponents))


class NuInnerProduct:
    """
    The modified inner product <p, q>_nu = <p, q>_mu + (D p(xi))^tr Lambda (D q(xi)) on MonomialPoly objects.

    The base part uses the Dirichlet moments of the simplex weight, the mass part evaluates
    the derivative functionals termwise. In exact mode every quantity is a Fraction,
    built from the exact binary values of the float inputs.

    Attributes:
        base (SimplexJacobiParams): The simplex weight.
        mass (MassSpec): The mass conditions; None for the base measure alone.
        exact (bool): Rational arithmetic instead of floating point.

    Methods:
        moment: Normalized moment of x^alpha.
        pair: The bilinear form.
        gram_matrix: Gram matrix of a list of monomials.
        exact_factor: Exact LDL^tr factorization of a Gram matrix.

    Examples:
        >>> ip = NuInnerProduct(base=SimplexJacobiParams(2, (0.0, 0.0, 0.0)))
        >>> x1 = MonomialPoly.variable(2, 1)
        >>> ip.pair(x1, MonomialPoly.constant(2, 1.0))
        0.3333333333333333
    """

    def __init__(self, base: SimplexJacobiParams = None, mass: MassSpec = None, exact: bool = False) -> None:
        if mass is not None and mass.d != base.d:
            raise InvalidParameters(f"Mass points have dimension {mass.d}, the weight has dimension {base.d}")
        self.base = base
        self.mass = mass
        self.exact = exact
        self._moments = {}
        self._factors = {}
        self._lock = threading.Lock()
        if exact:
            self._kappa = [Fraction(k) for k in base.kappa]
            self._lam = sum(self._kappa) + Fraction(base.d + 1, 2)
            if mass is not None:
                self._points = [[Fraction(float(c)) for c in point] for point in mass.points]
                self._lambda = [[Fraction(float(v)) for v in row] for row in mass.mass_matrix]

    def moment(self, alpha: MultiIndex):
        """Normalized moment of x^alpha: a float, or a Fraction in exact mode."""
        if alpha not in self._moments:
            if self.exact:
                numerators = [self._kappa[i] + _HALF + m for i, e in enumerate(alpha.exponents) for m in range(e)]
                value = Fraction(1)
                for j, numerator in enumerate(numerators):
                    value *= numerator / (self._lam + j)
            else:
                value = moment(self.base, alpha)
            self._moments[alpha] = value
        return self._moments[alpha]

    def _functional(self, index: int, beta: MultiIndex):
        alpha = self.mass.deriv_orders[index]
        factor = _derivative_factor(beta, alpha)
        if factor == 0:
            return Fraction(0) if self.exact else 0.0
        exponents = [b - a for a, b in zip(alpha.exponents, beta.exponents)]
        if self.exact:
            return factor * math.prod((c ** e for c, e in zip(self._points[index], exponents)), start=Fraction(1))
        return factor * math.prod(float(c) ** e for c, e in zip(self.mass.points[index], exponents))

    def functional_matrix(self, indices) -> list:
        """N x t matrix (nested lists) of d^{alpha_i} x^beta at xi_i for beta in indices."""
        if self.mass is None:
            return []
        return [[self._functional(i, beta) for beta in indices] for i in range(self.mass.N)]

    def _lambda_entry(self, i: int, j: int):
        return self._lambda[i][j] if self.exact else float(self.mass.mass_matrix[i, j])

    def exact_gram(self, indices) -> list:
        """Gram matrix of the monomials x^beta, beta in indices, as nested lists of the active number type."""
        size = len(indices)
        gram = [[self.moment(indices[i] + indices[j]) for j in range(size)] for i in range(size)]
        if self.mass is None:
            return gram
        functionals = self.functional_matrix(indices)
        count = self.mass.N
        weighted = [[sum((self._lambda_entry(i, k) * functionals[k][b] for k in range(count)),
                         Fraction(0) if self.exact else 0.0) for b in range(size)] for i in range(count)]
        for a in range(size):
            for b in range(size):
                gram[a][b] += sum((functionals[i][a] * weighted[i][b] for i in range(count)),
                                  Fraction(0) if self.exact else 0.0)
        return gram

    def gram_matrix(self, indices) -> np.ndarray:
        """Gram matrix of the monomials x^beta, beta in indices, as a float array."""
        return np.array([[float(v) for v in row] for row in self.exact_gram(indices)])

    def exact_factor(self, indices) -> tuple:
        """
        Exact factorization G = L D L^tr of the Gram matrix of the given monomials, cached per index list.

        Returns:
            (tuple): (unit lower triangular L, pivots D), both of Fractions.

        Raises:
            FactorizationFailed: If a relative pivot falls below the oracle threshold.
        """
        key = tuple(indices)
        size = len(key)
        with self._lock:
            for cached, (lower, pivots) in self._factors.items():
                # leading blocks of a graded factorization are factorizations themselves
                if len(cached) >= size and cached[:size] == key:
                    return [row[:size] for row in lower[:size]], pivots[:size]
            self._factors[key] = self._ldl(key)
        return self._factors[key]

    def _ldl(self, indices: tuple) -> tuple:
        if not self.exact:
            raise InvalidParameters("Exact factorization needs an exact inner product")
        gram = self.exact_gram(indices)
        size = len(indices)
        lower = [[Fraction(0)] * size for _ in range(size)]
        pivots = []
        for j in range(size):
            pivot = gram[j][j] - sum((lower[j][k] ** 2 * pivots[k] for k in range(j)), Fraction(0))
            if pivot <= 0 or pivot / gram[j][j] < ORACLE_PIVOT_THRESHOLD:
                log.error('[Uvarov.Oracle]: singular Gram matrix at degree %s', indices[j].degree)
                raise FactorizationFailed(
                    f"Gram matrix is numerically singular at degree {indices[j].degree} (monomial {indices[j].exponents})"
                )
            pivots.append(pivot)
            lower[j][j] = Fraction(1)
            scaled = [lower[j][k] * pivots[k] for k in range(j)]
            for i in range(j + 1, size):
                lower[i][j] = (gram[i][j] - sum((lower[i][k] * scaled[k] for k in range(j)), Fraction(0))) / pivot
        return lower, pivots

    def pair(self, p: MonomialPoly, q: MonomialPoly) -> float:
        """
        The bilinear form <p, q>_nu, symmetric in its arguments.

        Returns:
            (float): The value; in exact mode the exact rational value rounded once.
        """
        if p.d != self.base.d or q.d != self.base.d:
            raise InvalidParameters(f"Polynomials must have dimension {self.base.d}")
        convert = Fraction if self.exact else float
        terms = [convert(a) * convert(b) * self.moment(alpha + beta)
                 for alpha, a in p.coefficients.items() for beta, b in q.coefficients.items()]
        if self.mass is not None:
            fp = [sum((convert(a) * self._functional(i, alpha) for alpha, a in p.coefficients.items()), convert(0))
                  for i in range(self.mass.N)]
            fq = [sum((convert(b) * self._functional(i, beta) for beta, b in q.coefficients.items()), convert(0))
                  for i in range(self.mass.N)]
            terms.extend(fp[i] * self._lambda_entry(i, j) * fq[j] for i in range(self.mass.N) for j in range(self.mass.N))
        if self.exact:
            return float(sum(terms, Fraction(0)))
        return math.fsum(terms)


def nu_pair(ip: NuInnerProduct, p: MonomialPoly, q: MonomialPoly) -> float:
    """The modified inner product <p, q>_nu."""
    return ip.pair(p, q)


@dataclass(frozen=True, eq=False)
class OracleSystem:
    """
    A graded system of polynomials orthonormal under a NuInnerProduct.

    Row k of coefficients holds the monomial coefficients of the k-th polynomial along indices;
    the matrix is lower triangular, so polynomial k has the degree of indices[k].

    Attributes:
        max_degree (int): Highest degree.
        indices (tuple): The monomial order used.
        degrees (np.ndarray): Degree of every polynomial.
        coefficients (np.ndarray): Lower triangular coefficient matrix.
        polys (tuple): The polynomials as MonomialPoly objects.
        ip (NuInnerProduct): The inner product.
    """
    max_degree: int
    indices: tuple
    degrees: np.ndarray
    coefficients: np.ndarray
    polys: tuple
    ip: NuInnerProduct
    exact_lower: list = field(default=None, repr=False)
    exact_pivots: list = field(default=None, repr=False)
    forward_cache: dict = field(default_factory=dict, repr=False)
    forward_lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def monomial_values(self, x) -> np.ndarray:
        """Values x^beta along the monomial order."""
        point = np.asarray(x, dtype=float)
        return np.array([math.prod(float(c) ** e for c, e in zip(point, beta.exponents)) for beta in self.indices])

    def values(self, x) -> np.ndarray:
        """Values of all polynomials at x."""
        return self.coefficients @ self.monomial_values(x)

    def block(self, j: int) -> np.ndarray:
        """Coefficient rows of the degree-j polynomials."""
        return self.coefficients[self.degrees == j]


def _equilibrated_cholesky(gram: np.ndarray, indices: tuple) -> tuple:
    scale = 1.0 / np.sqrt(np.diag(gram))
    scaled = gram * np.outer(scale, scale)
    try:
        lower = cholesky(scaled, lower=True)
    except LinAlgError as exception:
        for j in sorted({beta.degree for beta in indices}):
            size = sum(1 for beta in indices if beta.degree <= j)
            try:
                cholesky(scaled[:size, :size], lower=True)
            except LinAlgError:
                log.error('[Uvarov.Oracle]: singular Gram matrix at degree %s', j)
                raise FactorizationFailed(f"Gram matrix is numerically singular at degree {j}") from exception
        raise FactorizationFailed("Gram matrix is numerically singular") from exception
    pivots = np.diag(lower) ** 2
    if pivots.min() < ORACLE_PIVOT_THRESHOLD:
        degree = indices[int(np.argmin(pivots))].degree
        log.error('[Uvarov.Oracle]: pivot %.3g below threshold at degree %s', pivots.min(), degree)
        raise FactorizationFailed(f"Gram matrix is numerically singular at degree {degree}")
    return lower, scale


def build_oracle(ip: NuInnerProduct, n: int, permutation_seed: int = None) -> OracleSystem:
    """
    Orthonormalize the monomials of degree <= n under ip by a Cholesky factorization of their Gram matrix.

    Args:
        :param ip (NuInnerProduct): The inner product.
        :param n (int): Highest degree.
        :param permutation_seed (int): When given, monomials are shuffled inside every degree block
            with this seed; the spanned spaces and the kernels do not change.

    Returns:
        (OracleSystem): The orthonormal system.

    Raises:
        MonomialCeilingExceeded: If n exceeds the monomial ceiling.
        FactorizationFailed: If the Gram matrix is numerically singular; the message names the degree.
    """
    if n > MONOMIAL_DEGREE_CEILING:
        log.error('[Uvarov.Oracle]: degree %s beyond the monomial ceiling', n)
        raise MonomialCeilingExceeded(f"Oracle degree {n} exceeds the monomial ceiling {MONOMIAL_DEGREE_CEILING}")
    d = ip.base.d
    if permutation_seed is None:
        indices = graded_monomials(d, n)
    else:
        rng = np.random.default_rng(permutation_seed)
        indices = tuple(
            beta for j in range(n + 1)
            for beta in (enumerate_degree(d, j).indices[k] for k in rng.permutation(len(enumerate_degree(d, j))))
        )
    size = len(indices)
    exact_lower = exact_pivots = None
    if ip.exact:
        lower, pivots = ip.exact_factor(indices)
        # L^{-1} by forward substitution, exactly
        inverse = [[Fraction(0)] * size for _ in range(size)]
        for i in range(size):
            inverse[i][i] = Fraction(1)
            for j in range(i):
                inverse[i][j] = -sum((lower[i][k] * inverse[k][j] for k in range(j, i)), Fraction(0))
        coefficients = np.array([[float(inverse[i][j]) for j in range(size)] for i in range(size)])
        coefficients /= np.sqrt(np.array([float(p) for p in pivots]))[:, None]
        exact_lower, exact_pivots = lower, pivots
    else:
        lower, scale = _equilibrated_cholesky(ip.gram_matrix(indices), indices)
        coefficients = solve_triangular(lower, np.eye(size), lower=True) * scale[None, :]
    polys = tuple(MonomialPoly(d, {beta: c for beta, c in zip(indices, row) if c != 0.0}) for row in coefficients)
    log.info('[Uvarov.Oracle]: oracle system of degree %s built with %s polynomials', n, size)
    return OracleSystem(
        max_degree=n,
        indices=indices,
        degrees=np.array([beta.degree for beta in indices]),
        coefficients=coefficients,
        polys=polys,
        ip=ip,
        exact_lower=exact_lower,
        exact_pivots=exact_pivots,
    )


def _exact_forward(system: OracleSystem, x) -> list:
    key = tuple(float(c) for c in np.asarray(x, dtype=float))
    with system.forward_lock:
        if key in system.forward_cache:
            return system.forward_cache[key]
    point = [Fraction(c) for c in key]
    values = [math.prod((c ** e for c, e in zip(point, beta.exponents)), start=Fraction(1)) for beta in system.indices]
    lower = system.exact_lower
    solution = []
    for i, value in enumerate(values):
        solution.append(value - sum((lower[i][k] * solution[k] for k in range(i)), Fraction(0)))
    with system.forward_lock:
        return system.forward_cache.setdefault(key, solution)


def oracle_kernel(system: OracleSystem, n: int, x, y) -> float:
    """
    K_n(nu; x, y) as the sum of q(x) q(y) over the oracle polynomials of degree <= n.
    With an exact inner product the sum is evaluated exactly from the LDL^tr factors.

    Raises:
        InvalidParameters: If n exceeds the system degree.
    """
    if n > system.max_degree:
        raise InvalidParameters(f"Oracle system has degree {system.max_degree}, got n={n}")
    if system.exact_lower is not None:
        wx = _exact_forward(system, x)
        wy = wx if np.array_equal(np.asarray(x, dtype=float), np.asarray(y, dtype=float)) else _exact_forward(system, y)
        total = sum((wx[k] * wy[k] / system.exact_pivots[k] for k in range(len(wx)) if system.degrees[k] <= n),
                    Fraction(0))
        return float(total)
    mask = system.degrees <= n
    return float(system.values(x)[mask] @ system.values(y)[mask])


def christoffel_minimum(ip: NuInnerProduct, n: int, x) -> float:
    """
    min <p, p>_nu over polynomials of degree <= n with p(x) = 1.

    The KKT system [[2G, v], [v^tr, 0]] [c; mu] = [0; 1] over the monomial Gram matrix G with v = (x^beta)
    is solved after diagonal equilibration; in exact mode its Schur complement is solved with the exact
    LDL^tr factors and the minimum 1 / (v^tr G^{-1} v) is exact.
    """
    indices = graded_monomials(ip.base.d, n)
    if ip.exact:
        lower, pivots = ip.exact_factor(indices)
        point = [Fraction(float(c)) for c in np.asarray(x, dtype=float)]
        values = [math.prod((c ** e for c, e in zip(point, beta.exponents)), start=Fraction(1)) for beta in indices]
        solution = []
        for i, value in enumerate(values):
            solution.append(value - sum((lower[i][k] * solution[k] for k in range(i)), Fraction(0)))
        return float(1 / sum((w * w / p for w, p in zip(solution, pivots)), Fraction(0)))
    gram = ip.gram_matrix(indices)
    values = np.array([math.prod(float(c) ** e for c, e in zip(x, beta.exponents)) for beta in indices])
    scale = 1.0 / np.sqrt(np.diag(gram))
    size = len(indices)
    kkt = np.zeros((size + 1, size + 1))
    kkt[:size, :size] = 2.0 * gram * np.outer(scale, scale)
    kkt[:size, size] = kkt[size, :size] = scale * values
    rhs = np.zeros(size + 1)
    rhs[size] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', LinAlgWarning)
        solution = solve(kkt, rhs, assume_a='sym')
    coefficients = solution[:size] * scale
    return float(coefficients @ gram @ coefficients)


@dataclass(frozen=True)
class ReportEntry:
    """
    One verification check.

    Attributes:
        check (str): Name of the check.
        degree (int): Degree the check applies to.
        max_abs (float): Largest absolute deviation.
        max_rel (float): Largest deviation relative to max(1, |reference|).
        passed (bool): max_rel within the tolerance.
    """
    check: str
    degree: int
    max_abs: float
    max_rel: float
    passed: bool

    def as_dict(self) -> dict:
        """The entry keyed by the report header."""
        return {key: getattr(self, key) for key in REPORT_HEADER}


@dataclass(frozen=True)
class EquivalenceReport:
    """
    Outcome of a verification run.

    Attributes:
        entries (tuple): ReportEntry objects in execution order.
        diagnostics (tuple): Messages of failures that stopped a check.
        passed (bool): All entries passed and no diagnostics were raised.
    """
    entries: tuple
    diagnostics: tuple = ()

    @property
    def passed(self) -> bool:
        """True when every entry passed and nothing was diagnosed."""
        return not self.diagnostics and all(entry.passed for entry in self.entries)

    def rows(self) -> list:
        """Entries as dictionaries for tabular output."""
        return [entry.as_dict() for entry in self.entries]


class _Collector:
    """Accumulates deviations per (check, degree)."""

    def __init__(self, tolerance: float) -> None:
        self.tolerance = tolerance
        self._data = {}

    def add(self, check: str, degree: int, value: float, reference: float = 0.0, scale: float = None) -> None:
        deviation = abs(float(value) - float(reference))
        norm = max(1.0, abs(float(reference))) if scale is None else max(1.0, scale)
        key = (check, degree)
        previous = self._data.get(key, (0.0, 0.0))
        self._data[key] = (max(previous[0], deviation), max(previous[1], deviation / norm))

    def entries(self) -> list:
        return [ReportEntry(check=check, degree=degree, max_abs=abs_dev, max_rel=rel_dev,
                            passed=bool(rel_dev <= self.tolerance))
                for (check, degree), (abs_dev, rel_dev) in self._data.items()]


def _check_configuration(system: OracleSystem, engine: UvarovEngine) -> None:
    provider = engine.provider
    ip = system.ip
    params = getattr(provider, 'params', None)
    same_base = params is not None and params.d == ip.base.d and params.kappa == ip.base.kappa
    mass = ip.mass
    same_mass = mass is not None and mass.N == engine.mass.N and np.array_equal(mass.points, engine.mass.points) \
        and np.array_equal(mass.mass_matrix, engine.mass.mass_matrix) and mass.deriv_orders == engine.mass.deriv_orders
    if not (same_base and same_mass):
        log.error('[Uvarov.Oracle]: oracle and engine configurations differ')
        raise InvalidParameters("Oracle and engine configurations (d, kappa, mass) differ")


def _q_monomial_coefficients(engine: UvarovEngine, system: OracleSystem, n: int) -> np.ndarray:
    """Monomial coefficients of Q_n along the oracle's monomial order."""
    provider = engine.provider
    base_rows = []
    for j in range(n + 1):
        for poly in provider.as_monomials(j):
            base_rows.append(poly.coefficient_vector(system.indices))
    return engine.q_coefficients(n) @ np.array(base_rows)


def _float_factors(lower: list, pivots: list) -> tuple:
    return np.array([[float(v) for v in row] for row in lower]), np.array([float(p) for p in pivots])


def _pairing_data(system: OracleSystem, q_coefficients: np.ndarray, gram: np.ndarray, n: int) -> tuple:
    """
    Gram block of Q_n, its pairings with every monomial and its nu-norm outside the oracle degree-n block.

    With exact factors G = L D L^tr the forms are taken through y = c L, which avoids
    the cancellation of c G c^tr for large monomial coefficients c.
    """
    in_block = system.degrees == n
    if system.exact_lower is not None:
        lower, pivots = _float_factors(system.exact_lower, system.exact_pivots)
        projected = q_coefficients @ lower
        weighted = projected * pivots
        outside = np.sum(weighted[:, ~in_block] * projected[:, ~in_block], axis=1)
        return weighted @ projected.T, weighted @ lower.T, outside
    pairings = q_coefficients @ gram
    block = system.block(n)
    residual = q_coefficients - (pairings @ block.T) @ block
    return pairings @ q_coefficients.T, pairings, np.diag(residual @ gram @ residual.T)


def _collect_equivalence(collector: _Collector, system: OracleSystem, engine: UvarovEngine, points) -> None:
    gram = system.ip.gram_matrix(system.indices)
    for n in range(system.max_degree + 1):
        q_coefficients = _q_monomial_coefficients(engine, system, n)
        q_gram, pairings, outside = _pairing_data(system, q_coefficients, gram, n)
        norms = np.sqrt(np.diag(q_gram))
        lower_mask = system.degrees < n
        if lower_mask.any():
            scaled = pairings[:, lower_mask] / norms[:, None]
            collector.add('nu_orthogonality', n, float(np.max(np.abs(scaled))))
        residual_norms = np.sqrt(np.clip(outside, 0.0, None)) / norms
        collector.add('span', n, float(np.max(residual_norms)))
        h_block, _ = engine.h_blocks(n)
        scale = float(np.max(np.abs(h_block)))
        collector.add('h_block', n, float(np.max(np.abs(q_gram - h_block))), scale=scale)
        for x in points:
            for y in points:
                collector.add('sum_kernel', n, engine.modified_sum_kernel(n, x, y), oracle_kernel(system, n, x, y))


def equivalence_report(system: OracleSystem, engine: UvarovEngine, points,
                       tolerance: float = VERIFY_TOLERANCE) -> EquivalenceReport:
    """
    Compare the engine with the oracle system through degree system.max_degree.

    Checks, per degree n: nu-orthogonality of Q_n to the monomials of lower degree, the nu-norm residual of
    projecting Q_n on the oracle degree-n block (span), H_n against <Q_n, Q_n^tr>_nu, and K_n(nu; x, y)
    against the oracle kernel on all point pairs.

    Raises:
        InvalidParameters: If the oracle and the engine describe different configurations.
    """
    _check_configuration(system, engine)
    collector = _Collector(tolerance)
    _collect_equivalence(collector, system, engine, [validate_point(p, system.ip.base.d) for p in points])
    report = EquivalenceReport(entries=tuple(collector.entries()))
    log.info('[Uvarov.Oracle]: equivalence report through degree %s passed=%s', system.max_degree, report.passed)
    return report


def _is_vertex_model(spec: BasisSpec, mass: MassSpec) -> bool:
    d = spec.d
    vertices = np.array([simplex_vertex(d, i) for i in range(1, d + 2)])
    matrix = mass.mass_matrix
    return (spec.params.is_symmetric and mass.is_plain and mass.N == d + 1 and np.array_equal(mass.points, vertices)
            and np.array_equal(matrix, matrix[0, 0] * np.eye(d + 1)))


def exact_oracle_degree(d: int, n: int) -> int:
    """
    Highest degree up to n whose monomial system stays within the exact factorization limit.

    Args:
        :param d (int): Dimension.
        :param n (int): Requested degree.

    Returns:
        (int): The degree the exact oracle checks run at.

    Examples:
        >>> exact_oracle_degree(2, 20)
        14
    """
    top = min(n, MONOMIAL_DEGREE_CEILING)
    while top > 0 and math.comb(top + d, d) > EXACT_ORACLE_MAX_MONOMIALS:
        top -= 1
    if top < n:
        log.info('[Uvarov.Oracle]: exact checks lowered from degree %s to %s for d=%s', n, top, d)
    return top


def _collect_base(collector: _Collector, spec: BasisSpec, degrees: list, points: list) -> None:
    top = exact_oracle_degree(spec.d, max(degrees))
    plain = NuInnerProduct(base=spec.params, exact=True)
    lower, pivots = _float_factors(*plain.exact_factor(graded_monomials(spec.d, top)))
    projected = spec.coefficient_matrix(top) @ lower
    gram = (projected * pivots) @ projected.T
    collector.add('basis_orthonormality', top, float(np.max(np.abs(gram - np.eye(gram.shape[0])))))
    for n in degrees:
        for x in points:
            for i in range(1, spec.d + 2):
                reference = kernel_sum_eval(spec, n, x, simplex_vertex(spec.d, i)).value
                collector.add('closed_form_kernel', n, kernel_vertex_closed_form(spec, n, x, i).value, reference)
            for y in points:
                reference = kernel_sum_eval(spec, n, x, y).value
                collector.add('integral_form_kernel', n, kernel_integral_form(spec, n, x, y).value, reference)


def _collect_engine(collector: _Collector, engine: UvarovEngine, degrees: list, points: list) -> None:
    for n in range(max(degrees) + 1):
        for name, value in engine.matrix_identity_residuals(n).items():
            collector.add(name, n, value)
        for x in points:
            telescoped = engine.kernel_vector(n, x) - engine.kernel_vector(n - 1, x)
            increment = engine.build_state(n).P_xi.T @ engine.provider.evaluate(n, x)
            collector.add('kernel_vector_telescoping', n, float(np.max(np.abs(telescoped - increment))))
            for y in points:
                total = math.fsum(engine.modified_projection_kernel(j, x, y) for j in range(n + 1))
                collector.add('projection_sum', n, total, engine.modified_sum_kernel(n, x, y))


def _collect_vertex_model(collector: _Collector, spec: BasisSpec, engine: UvarovEngine, degrees: list,
                          points: list) -> None:
    model = VertexMassModel(d=spec.d, sigma=spec.params.sigma, M=float(engine.mass.mass_matrix[0, 0]))
    for n in range(max(degrees) + 1):
        dense = engine.build_state(n).S_n
        structured = structured_inverse(model, vertex_constants(spec, n))
        collector.add('structured_inverse', n, float(np.max(np.abs(structured - dense))))
        for x in points:
            collector.add('vertex_q', n, float(np.max(np.abs(vertex_mass_q_eval(model, spec, n, x)
                                                             - engine.q_eval(n, x)))))
            reference = engine.modified_sum_kernel(n, x, x)
            collector.add('vertex_kernel', n, vertex_mass_kernel(model, spec, n, x, x), reference)


def verification_suite(spec: BasisSpec, mass: MassSpec, degrees, points,
                       tolerance: float = VERIFY_TOLERANCE) -> EquivalenceReport:
    """
    Run every verification check of the package on one configuration.

    Covers the basis normalization, the closed-form and integral-form kernels, the engine identities,
    the oracle equivalence, the Christoffel variational identity and, for equal vertex masses
    under a symmetric weight, the structured specialization. Oracle checks use exact arithmetic
    and stop at the monomial ceiling.

    A mass matrix that is indefinite, or a singular system, is reported as a diagnostic instead of raised.

    Args:
        :param spec (BasisSpec): The basis.
        :param mass (MassSpec): The mass conditions.
        :param degrees (iterable): Degrees to check.
        :param points (iterable): Evaluation points.
        :param tolerance (float): Pass threshold of every check.

    Returns:
        (EquivalenceReport): The report.
    """
    degrees = sorted(set(int(n) for n in degrees))
    points = [validate_point(p, spec.d) for p in points]
    collector = _Collector(tolerance)
    diagnostics = []
    try:
        _collect_base(collector, spec, degrees, points)
        engine = UvarovEngine(provider=spec, mass=mass)
        _collect_engine(collector, engine, degrees, points)
        top = exact_oracle_degree(spec.d, max(degrees))
        ip = NuInnerProduct(base=spec.params, mass=mass, exact=True)
        system = build_oracle(ip, top)
        _collect_equivalence(collector, system, engine, points)
        for n in range(top + 1):
            for x in points:
                collector.add('christoffel_variational', n, christoffel_minimum(ip, n, x), engine.christoffel(n, x))
        if _is_vertex_model(spec, mass):
            _collect_vertex_model(collector, spec, engine, degrees, points)
    except IndefiniteMassMatrix as exception:
        diagnostics.append(f"indefinite mass matrix: {exception.message}")
    except (FactorizationFailed, CalibrationMismatch) as exception:
        diagnostics.append(f"numerical failure: {exception.message}")
    for message in diagnostics:
        log.error('[Uvarov.Oracle]: verification stopped: %s', message)
    report = EquivalenceReport(entries=tuple(collector.entries()), diagnostics=tuple(diagnostics))
    log.info('[Uvarov.Oracle]: verification finished with %s checks, passed=%s', len(report.entries), report.passed)
    return report
