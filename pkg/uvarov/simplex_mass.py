"""
This module specializes the Uvarov modification to equal masses at all vertices of the simplex
under a symmetric Jacobi weight, and provides the asymptotics harness for the modified kernels.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
import numpy as np
from scipy.special import gammaln
from logger import log
from .config import sweep_workers
from .constants import FACE_TOLERANCE, KERNEL_TABLE_HEADER, LIMIT_CONVERGENCE_TOLERANCE
from .exceptions import FactorizationFailed, InvalidParameters
from .jacobi1d import JacobiParams, jacobi_eval
from .kernels import VertexConstants, kernel_sum_diagonal, kernel_sum_eval, kernel_vertex_closed_form, vertex_constants
from .simplex_basis import BasisSpec, SimplexJacobiParams, barycentric, simplex_vertex, validate_point
from .uvarov_engine import MassSpec, UvarovEngine


@dataclass(frozen=True)
class VertexMassModel:
    """
    Equal mass M at every vertex e_1, ..., e_{d+1} of T^d under the weight kappa_i = sigma.

    Attributes:
        d (int): Dimension.
        sigma (float): The common Jacobi exponent, sigma >= 0.
        M (float): The vertex mass, M >= 0.

    Raises:
        InvalidParameters: If sigma or M is negative or not finite, or d < 1.

    Examples:
        >>> model = VertexMassModel(d=2, sigma=0.0, M=1.0)
        >>> model.lam
        1.5
    """
    # pylint: disable=invalid-name
    d: int
    sigma: float
    M: float

    def __post_init__(self) -> None:
        if self.d < 1:
            raise InvalidParameters(f"Dimension must be at least 1, got d={self.d}")
        if not (math.isfinite(self.sigma) and self.sigma >= 0.0):
            raise InvalidParameters(f"sigma must be finite and nonnegative, got {self.sigma}")
        if not (math.isfinite(self.M) and self.M >= 0.0):
            raise InvalidParameters(f"Vertex mass must be finite and nonnegative, got {self.M}")

    @property
    def lam(self) -> float:
        """lambda = (d + 1)(sigma + 1/2)."""
        return (self.d + 1) * (self.sigma + 0.5)

    @property
    def params(self) -> SimplexJacobiParams:
        """The symmetric simplex weight."""
        return SimplexJacobiParams.symmetric(self.d, self.sigma)

    def vertices(self) -> np.ndarray:
        """The (d + 1) x d matrix of vertices e_1, ..., e_d, e_{d+1} = 0."""
        return np.array([simplex_vertex(self.d, i) for i in range(1, self.d + 2)])

    def mass_spec(self) -> MassSpec:
        """Mass conditions with Lambda = M I at the vertices."""
        return MassSpec.uniform(self.vertices(), self.M)

    def basis(self, max_degree: int) -> BasisSpec:
        """The orthonormal basis of the symmetric weight."""
        return BasisSpec(params=self.params, max_degree=max_degree)

    def engine(self, spec: BasisSpec) -> UvarovEngine:
        """The general engine over the same mass conditions."""
        return UvarovEngine(provider=spec, mass=self.mass_spec())


@dataclass(frozen=True)
class FaceLabel:
    """
    The face T_k^d containing a point: k + 1 barycentric coordinates are positive.

    Attributes:
        k (int): Face dimension, 0 for vertices and d for the interior.
        active_coordinates (tuple): 1-based indices of the positive barycentric coordinates.
    """
    k: int
    active_coordinates: tuple


def classify_point(x, d: int) -> FaceLabel:
    """
    Classify a point of T^d by the barycentric coordinates above the face tolerance.

    Raises:
        PointOutsideSimplex: If x is off the simplex.

    Examples:
        >>> classify_point([0.5, 0.5], 2)
        FaceLabel(k=1, active_coordinates=(1, 2))
    """
    coordinates = barycentric(validate_point(x, d))
    active = tuple(int(i) + 1 for i in np.flatnonzero(coordinates > FACE_TOLERANCE))
    return FaceLabel(k=len(active) - 1, active_coordinates=active)


def _check_model(model: VertexMassModel, spec: BasisSpec) -> None:
    if spec.d != model.d or spec.params.kappa != model.params.kappa:
        log.error('[Uvarov.SimplexMass]: basis kappa %s does not match the model', spec.params.kappa)
        raise InvalidParameters(
            f"Basis with d={spec.d}, kappa={spec.params.kappa} does not match d={model.d}, sigma={model.sigma}"
        )


def _denominators(model: VertexMassModel, constants: VertexConstants) -> tuple:
    mass = model.M
    first = 1.0 + mass * (constants.A - constants.B)
    second = 1.0 + mass * constants.A + model.d * mass * constants.B
    if first <= 0.0 or second <= 0.0:
        log.error('[Uvarov.SimplexMass]: vanishing denominator at degree %s', constants.n)
        raise FactorizationFailed(f"Rank-one inverse denominators {first:.6g}, {second:.6g} are not positive")
    return first, second


def structured_inverse(model: VertexMassModel, constants: VertexConstants) -> np.ndarray:
    """
    The matrix (I + Lambda K_n)^{-1} Lambda for Lambda = M I, where K_n = (A - B) I + B 11^tr:
    M / ([1 + M(A-B)][1 + MA + dMB]) * [(1 + MA + dMB) I - MB 11^tr].

    Args:
        :param model (VertexMassModel): The masses.
        :param constants (VertexConstants): Calibrated A_n and B_n.

    Returns:
        (np.ndarray): The (d + 1) x (d + 1) matrix.
    """
    first, second = _denominators(model, constants)
    size = model.d + 1
    mass = model.M
    return mass / (first * second) * (second * np.eye(size) - mass * constants.B * np.ones((size, size)))


def _correction_coefficients(model: VertexMassModel, constants: VertexConstants) -> tuple:
    first, second = _denominators(model, constants)
    return model.M / first, model.M ** 2 * constants.B / (first * second)


def _vertex_kernels(spec: BasisSpec, n: int, x) -> np.ndarray:
    return np.array([kernel_vertex_closed_form(spec, n, x, i).value for i in range(1, spec.d + 2)])


def vertex_mass_q_eval(model: VertexMassModel, spec: BasisSpec, n: int, x) -> np.ndarray:
    """
    Modified basis of the vertex masses:
    Q_n(x) = P_n(x) - M/(1+M(A-B)) sum_i P_n(e_i) K_{n-1}(x, e_i)
             + M^2 B / ([1+M(A-B)][1+MA+dMB]) (sum_i P_n(e_i)) (sum_i K_{n-1}(x, e_i)),
    with the constants of degree n - 1 and the closed-form vertex kernels.
    """
    _check_model(model, spec)
    values = spec.evaluate(n, x)
    if n == 0:
        return values
    single, double = _correction_coefficients(model, vertex_constants(spec, n - 1))
    at_vertices = np.column_stack([spec.evaluate(n, v) for v in model.vertices()])
    kernels = _vertex_kernels(spec, n - 1, x)
    return values - single * (at_vertices @ kernels) + double * at_vertices.sum(axis=1) * kernels.sum()


def _kernel_correction(model: VertexMassModel, spec: BasisSpec, n: int, x, y) -> float:
    single, double = _correction_coefficients(model, vertex_constants(spec, n))
    kx = _vertex_kernels(spec, n, x)
    ky = _vertex_kernels(spec, n, y)
    return -single * float(kx @ ky) + double * float(kx.sum() * ky.sum())


def vertex_mass_kernel(model: VertexMassModel, spec: BasisSpec, n: int, x, y) -> float:
    """
    Modified kernel of the vertex masses:
    K_n(nu; x, y) = K_n(W; x, y) - M/(1+M(A-B)) sum_i K_n(x, e_i) K_n(y, e_i)
                    + M^2 B / ([1+M(A-B)][1+MA+dMB]) (sum_i K_n(x, e_i)) (sum_i K_n(y, e_i)).
    """
    _check_model(model, spec)
    return kernel_sum_eval(spec, n, x, y).value + _kernel_correction(model, spec, n, x, y)


@dataclass(frozen=True)
class AsymptoticDifference:
    """
    K_n(nu; x, x) - K_n(W; x, x) against its leading-order model.

    Attributes:
        n (int): The degree.
        lhs (float): The difference, from the correction terms of the modified kernel.
        rhs_model (float): -c sum_i P_n^{(lambda-sigma-1/2, sigma-1/2)}(2 x_i - 1)^2 with
            c = Gamma(lambda-sigma+1/2) Gamma(sigma+1/2) / Gamma(lambda).
        ratio (float): lhs / rhs_model; nan when rhs_model vanishes.
        b_term_share (float): |B_n correction| / |lhs|; nan when lhs vanishes.
        cauchy_schwarz_gap (float): (d+1) sum_i P_n^2 - (sum_i P_n)^2, never negative.
    """
    n: int
    lhs: float
    rhs_model: float
    ratio: float
    b_term_share: float
    cauchy_schwarz_gap: float


def asymptotic_difference(model: VertexMassModel, spec: BasisSpec, n: int, x) -> AsymptoticDifference:
    """
    Compare K_n(nu; x, x) - K_n(W; x, x) with its leading-order model; the ratio tends to 1 for d >= 2.
    The difference is taken from the correction terms directly, without subtracting two large kernels.
    """
    _check_model(model, spec)
    point = validate_point(x, model.d)
    sigma = model.sigma
    lam = model.lam
    jacobi = JacobiParams(lam - sigma - 0.5, sigma - 0.5)
    polys = np.asarray(jacobi_eval(jacobi, n, 2.0 * barycentric(point) - 1.0))
    single, double = _correction_coefficients(model, vertex_constants(spec, n))
    kernels = _vertex_kernels(spec, n, point)
    b_term = double * float(kernels.sum()) ** 2
    lhs = -single * float(kernels @ kernels) + b_term
    constant = math.exp(gammaln(lam - sigma + 0.5) + gammaln(sigma + 0.5) - gammaln(lam))
    rhs_model = -constant * float(polys @ polys)
    ratio = lhs / rhs_model if rhs_model != 0.0 else math.nan
    share = abs(b_term) / abs(lhs) if lhs != 0.0 else math.nan
    gap = (model.d + 1) * float(polys @ polys) - float(polys.sum()) ** 2
    return AsymptoticDifference(n=n, lhs=lhs, rhs_model=rhs_model, ratio=ratio, b_term_share=share,
                                cauchy_schwarz_gap=gap)


@dataclass(frozen=True)
class LimitEstimate:
    """
    Extrapolated limit of a sequence sampled at dyadic degrees.

    Attributes:
        value (float): The latest estimate.
        converged (bool): Whether the last two estimates agree within the tolerance.
        estimates (tuple): All Richardson estimates in degree order.
    """
    value: float
    converged: bool
    estimates: tuple = field(default=())


def estimate_limit(degrees, values, tolerance: float = LIMIT_CONVERGENCE_TOLERANCE) -> LimitEstimate:
    """
    Richardson-style limit estimate 2 v(2n) - v(n) over consecutive dyadic degree pairs.

    Convergence is declared when the last two estimates differ by less than tolerance * max(1, |estimate|).

    Args:
        :param degrees (iterable): Increasing degrees.
        :param values (iterable): Sequence values at those degrees.
        :param tolerance (float): Relative tolerance, 2% by default.

    Returns:
        (LimitEstimate): The estimate.

    Examples:
        >>> estimate_limit([25, 50, 100, 200], [4 - 6 / 27, 4 - 6 / 52, 4 - 6 / 102, 4 - 6 / 202]).converged
        True
    """
    pairs = sorted(zip(degrees, values))
    if not pairs:
        raise InvalidParameters("Limit estimation needs at least one value")
    lookup = dict(pairs)
    estimates = tuple(2.0 * lookup[2 * n] - v for n, v in pairs if 2 * n in lookup)
    if not estimates:
        return LimitEstimate(value=float(pairs[-1][1]), converged=False, estimates=())
    if len(estimates) < 2:
        return LimitEstimate(value=estimates[-1], converged=False, estimates=estimates)
    last, previous = estimates[-1], estimates[-2]
    converged = abs(last - previous) < tolerance * max(1.0, abs(last))
    return LimitEstimate(value=last, converged=converged, estimates=estimates)


def vertex_limit_candidates(d: int) -> dict:
    """
    Candidate constants for the limit of K_n(nu; e_i, e_i) / C(n+d, n) with kappa = 0.

    Returns:
        (dict): 'printed' = 2^d + E_d with E_d = Gamma(d/2+1) sqrt(pi) / (Gamma(d+1/2) 2^{d+1}),
            'calibrated' = 2^d + 2^{d+1} E_d and 'base' = 2^d, the limit without masses.
    """
    e_d = math.exp(gammaln(d / 2.0 + 1.0) - gammaln(d + 0.5)) * math.sqrt(math.pi) / 2.0 ** (d + 1)
    return {
        'printed': 2.0 ** d + e_d,
        'calibrated': 2.0 ** d + 2.0 ** (d + 1) * e_d,
        'base': 2.0 ** d,
    }


@dataclass(frozen=True)
class KernelRow:
    """One row of the asymptotics table; fields follow the CSV header."""
    # pylint: disable=invalid-name,too-many-instance-attributes
    d: int
    sigma: float
    M: float
    n: int
    point_id: str
    face_k: int
    K_base: float
    K_nu: float
    diff: float
    rhs_model: float
    ratio: float
    binom_scaled_base: float
    binom_scaled_nu: float

    def as_dict(self) -> dict:
        """The row keyed by the header columns."""
        row = asdict(self)
        return {key: row[key] for key in KERNEL_TABLE_HEADER}


@dataclass(frozen=True)
class KernelTable:
    """
    Rows of an asymptotics sweep in degree-major order, with per-point limit estimates.

    Attributes:
        rows (tuple): KernelRow objects.
        limits (dict): point_id -> {'base': LimitEstimate, 'nu': LimitEstimate} of the binomially scaled kernels.
        candidates (dict): vertex_limit_candidates(d).
    """
    rows: tuple
    limits: dict = field(default_factory=dict)
    candidates: dict = field(default_factory=dict)


def _point_rows(model: VertexMassModel, spec: BasisSpec, degrees: list, point_id: str, x) -> list:
    face = classify_point(x, model.d)
    diagonal = kernel_sum_diagonal(spec, max(degrees), x)
    rows = []
    for n in degrees:
        base = float(diagonal[n])
        difference = asymptotic_difference(model, spec, n, x)
        nu = base + difference.lhs
        scale = math.comb(n + model.d, n)
        rows.append(KernelRow(
            d=model.d, sigma=model.sigma, M=model.M, n=n, point_id=str(point_id), face_k=face.k,
            K_base=base, K_nu=nu, diff=difference.lhs, rhs_model=difference.rhs_model, ratio=difference.ratio,
            binom_scaled_base=base / scale, binom_scaled_nu=nu / scale,
        ))
    return rows


def face_limit_table(model: VertexMassModel, spec: BasisSpec, degrees, points, workers: int = None) -> KernelTable:
    """
    Sweep K_n(W; x, x) and K_n(nu; x, x), their binomially scaled values and the leading-order model
    over degrees and points.

    Points are evaluated in parallel; rows are assembled degree-major, then by point_id.

    Args:
        :param model (VertexMassModel): The masses.
        :param spec (BasisSpec): The basis, with max_degree >= max(degrees).
        :param degrees (iterable): The degrees.
        :param points (iterable): Pairs (point_id, x).
        :param workers (int): Thread count; defaults to the sweep parallelism setting.

    Returns:
        (KernelTable): The table.

    Raises:
        PointOutsideSimplex: If a point is off the simplex.
    """
    _check_model(model, spec)
    degrees = sorted(set(int(n) for n in degrees))
    points = sorted(((str(pid), validate_point(x, model.d)) for pid, x in points), key=lambda item: item[0])
    if not degrees or not points:
        return KernelTable(rows=(), limits={}, candidates=vertex_limit_candidates(model.d))
    workers = sweep_workers() if workers is None else workers
    with ThreadPoolExecutor(max_workers=workers) as executor:
        per_point = list(executor.map(lambda item: _point_rows(model, spec, degrees, item[0], item[1]), points))
    rows = tuple(row_list[k] for k in range(len(degrees)) for row_list in per_point)
    limits = {
        row_list[0].point_id: {
            'base': estimate_limit(degrees, [row.binom_scaled_base for row in row_list]),
            'nu': estimate_limit(degrees, [row.binom_scaled_nu for row in row_list]),
        }
        for row_list in per_point
    }
    log.info('[Uvarov.SimplexMass]: sweep finished with %s rows for d=%s sigma=%s M=%s',
             len(rows), model.d, model.sigma, model.M)
    return KernelTable(rows=rows, limits=limits, candidates=vertex_limit_candidates(model.d))
