"""
This module implements the measure-agnostic Uvarov modification:
given an orthonormal basis provider for a base measure and a set of mass conditions,
it builds the modified orthogonal polynomials, their Gram blocks and the modified reproducing kernels.
"""
import threading
import warnings
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
import numpy as np
from scipy.linalg import LinAlgWarning, eigh, eigvalsh, lu_factor, lu_solve
from logger import log
from .constants import MAX_DERIVATIVE_ORDER, PIVOT_TOLERANCE, SEMIDEFINITE_TOLERANCE, SYMMETRY_TOLERANCE
from .exceptions import (
    DerivativeOrderNotSupported,
    FactorizationFailed,
    IndefiniteMassMatrix,
    InvalidDimension,
    InvalidParameters,
)
from .polycore import MultiIndex


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class MassSpec:
    """
    Mass conditions added to the base measure: points xi_1..xi_N, optional derivative orders
    alpha_1..alpha_N and the symmetric weight matrix Lambda.

    The modified inner product is
    <f, g>_nu = <f, g>_mu + (D f(xi))^tr Lambda (D g(xi)), where (D f(xi))_i = d^{alpha_i} f(xi_i).

    Attributes:
        points (np.ndarray): N x d matrix of mass points.
        mass_matrix (np.ndarray): N x N symmetric matrix Lambda.
        deriv_orders (tuple): N multi-indices; all zero in the plain case.

    Methods:
        diagonal: Build a spec with a diagonal Lambda.
        uniform: Build a spec with Lambda = M I.
        check_semidefinite: Validate that Lambda is positive semidefinite.

    Raises:
        InvalidDimension: If the shapes are inconsistent.
        InvalidParameters: If two mass conditions coincide or an entry is not finite.
        IndefiniteMassMatrix: If Lambda is not symmetric.
        DerivativeOrderNotSupported: If some |alpha_i| exceeds the supported order.

    Examples:
        >>> mass = MassSpec.uniform([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]], 1.0)
        >>> mass.N
        3
    """
    points: np.ndarray
    mass_matrix: np.ndarray
    deriv_orders: tuple = field(default=None)

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=float, ndmin=2)
        mass_matrix = np.array(self.mass_matrix, dtype=float, ndmin=2)
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise InvalidDimension(f"Mass points must form a nonempty N x d matrix, got shape {points.shape}")
        count, d = points.shape
        if mass_matrix.shape != (count, count):
            log.error('[Uvarov.Engine]: mass matrix shape %s does not match %s points', mass_matrix.shape, count)
            raise InvalidDimension(f"Mass matrix must be {count} x {count}, got {mass_matrix.shape}")
        if not (np.all(np.isfinite(points)) and np.all(np.isfinite(mass_matrix))):
            raise InvalidParameters("Mass points and mass matrix must be finite")
        scale = max(1.0, float(np.max(np.abs(mass_matrix))))
        if np.max(np.abs(mass_matrix - mass_matrix.T)) > SYMMETRY_TOLERANCE * scale:
            log.error('[Uvarov.Engine]: mass matrix is not symmetric')
            raise IndefiniteMassMatrix("Mass matrix is not symmetric")
        orders = self.deriv_orders
        if orders is None:
            orders = tuple(MultiIndex.zero(d) for _ in range(count))
        orders = tuple(o if isinstance(o, MultiIndex) else MultiIndex(tuple(o)) for o in orders)
        if len(orders) != count:
            raise InvalidDimension(f"Expected {count} derivative orders, got {len(orders)}")
        for order in orders:
            if order.d != d:
                raise InvalidDimension(f"Derivative order {order.exponents} does not have dimension {d}")
            if order.degree > MAX_DERIVATIVE_ORDER:
                log.error('[Uvarov.Engine]: derivative order %s is not supported', order.exponents)
                raise DerivativeOrderNotSupported(
                    f"Derivative order |alpha|={order.degree} exceeds the supported maximum {MAX_DERIVATIVE_ORDER}"
                )
        for i in range(count):
            for j in range(i + 1, count):
                if orders[i] == orders[j] and np.allclose(points[i], points[j], rtol=0.0, atol=SYMMETRY_TOLERANCE):
                    log.error('[Uvarov.Engine]: mass conditions %s and %s coincide', i + 1, j + 1)
                    raise InvalidParameters(
                        f"Mass conditions {i + 1} and {j + 1} share the point {points[i].tolist()} "
                        f"and the derivative order {orders[i].exponents}"
                    )
        object.__setattr__(self, 'points', _frozen(points))
        object.__setattr__(self, 'mass_matrix', _frozen(mass_matrix))
        object.__setattr__(self, 'deriv_orders', orders)

    @classmethod
    def diagonal(cls, points, weights, deriv_orders=None) -> 'MassSpec':
        """Mass conditions with Lambda = diag(weights)."""
        return cls(points=points, mass_matrix=np.diag(np.asarray(weights, dtype=float)), deriv_orders=deriv_orders)

    @classmethod
    def uniform(cls, points, mass: float, deriv_orders=None) -> 'MassSpec':
        """Mass conditions with Lambda = mass * I."""
        count = np.array(points, dtype=float, ndmin=2).shape[0]
        return cls(points=points, mass_matrix=mass * np.eye(count), deriv_orders=deriv_orders)

    @property
    def N(self) -> int:  # pylint: disable=invalid-name
        """Number of mass conditions."""
        return self.points.shape[0]

    @property
    def d(self) -> int:
        """Dimension of the mass points."""
        return self.points.shape[1]

    @property
    def is_plain(self) -> bool:
        """True when no condition involves a derivative."""
        return all(order.degree == 0 for order in self.deriv_orders)

    def check_semidefinite(self) -> None:
        """
        Validate that Lambda is positive semidefinite.

        Raises:
            IndefiniteMassMatrix: If Lambda has an eigenvalue below -tolerance.
        """
        eigenvalues = eigvalsh(self.mass_matrix)
        scale = max(1.0, float(np.max(np.abs(eigenvalues))))
        if eigenvalues[0] < -SEMIDEFINITE_TOLERANCE * scale:
            log.error('[Uvarov.Engine]: mass matrix has a negative eigenvalue %s', eigenvalues[0])
            raise IndefiniteMassMatrix(f"Mass matrix is not positive semidefinite: smallest eigenvalue {eigenvalues[0]:.6g}")


class BasisProvider(ABC):
    """
    An orthonormal basis {P_n} of a base measure, exposed degree by degree.

    Implementations must return the degree-n block as a vector of length r_n in a fixed layout,
    and its partial derivatives in the same layout.
    """

    @property
    @abstractmethod
    def d(self) -> int:
        """Number of variables."""

    @property
    @abstractmethod
    def max_degree(self) -> int:
        """Highest degree the provider can evaluate."""

    @abstractmethod
    def dims(self, n: int) -> int:
        """Length r_n of the degree-n block."""

    @abstractmethod
    def evaluate(self, n: int, x) -> np.ndarray:
        """Values of the degree-n block at x."""

    @abstractmethod
    def derivative(self, n: int, alpha: MultiIndex, x) -> np.ndarray:
        """Values of d^alpha applied to the degree-n block at x."""

    def evaluate_all(self, n: int, x) -> list:
        """Blocks of degree 0..n at x."""
        return [self.evaluate(j, x) for j in range(n + 1)]


@dataclass(frozen=True, eq=False)
class DegreeState:
    """
    Matrices of one degree of the modification chain.

    Attributes:
        n (int): The degree.
        P_xi (np.ndarray): r_n x N matrix whose column i is d^{alpha_i} P_n(xi_i).
        K_mat (np.ndarray): N x N matrix K_n of the cumulative kernel on the mass conditions.
        solve_n (tuple): LU factorization of (I + Lambda K_n).
        solve_nm1 (tuple): LU factorization of (I + Lambda K_{n-1}); None at n = 0 where K_{-1} = 0.
        S_n (np.ndarray): (I + Lambda K_n)^{-1} Lambda.
        S_nm1 (np.ndarray): (I + Lambda K_{n-1})^{-1} Lambda; equals Lambda at n = 0.
        H (np.ndarray): The Gram block <Q_n, Q_n^tr>_nu.
        H_inv (np.ndarray): Its inverse, from its own closed form.
    """
    # pylint: disable=invalid-name
    n: int
    P_xi: np.ndarray
    K_mat: np.ndarray
    solve_n: tuple
    solve_nm1: tuple
    S_n: np.ndarray
    S_nm1: np.ndarray
    H: np.ndarray
    H_inv: np.ndarray


class UvarovEngine:
    """
    Modified orthogonal polynomials and kernels for the measure nu = mu + mass conditions.

    Degree states are built incrementally in a chain 0..n because K_n is cumulative.
    Chain extension is serialized by a lock; finished states are immutable and can be read concurrently.

    Attributes:
        provider (BasisProvider): The orthonormal basis of the base measure.
        mass (MassSpec): The mass conditions.

    Methods:
        build_state: The DegreeState of degree n.
        kernel_vector: The vector K_n(xi, x).
        q_eval: The modified polynomials Q_n(x).
        q_coefficients: Coefficients of Q_n in the base blocks P_0..P_n.
        h_blocks: The Gram block H_n and its inverse.
        orthonormal_q_eval: The nu-orthonormal block H_n^{-1/2} Q_n(x).
        base_kernel: The base kernel K_n(mu; x, y) or P_n(mu; x, y).
        modified_projection_kernel: P_n(nu; x, y).
        modified_sum_kernel: K_n(nu; x, y).
        christoffel: 1 / K_n(nu; x, x).
        matrix_identity_residuals: Residuals of the matrix identities of one state.

    Raises:
        InvalidDimension: If the provider and the mass points differ in dimension, or n is out of range.
        IndefiniteMassMatrix: If Lambda is not positive semidefinite.
        FactorizationFailed: If (I + Lambda K_n) is numerically singular.

    Examples:
        >>> engine = UvarovEngine(provider=basis, mass=MassSpec.uniform([[1.0]], 1.0))
        >>> engine.modified_sum_kernel(0, [0.5], [0.5])
        0.5
    """

    def __init__(self, provider: BasisProvider = None, mass: MassSpec = None) -> None:
        if provider.d != mass.d:
            log.error('[Uvarov.Engine]: provider dimension %s does not match mass dimension %s', provider.d, mass.d)
            raise InvalidDimension(f"Basis has dimension {provider.d}, mass points have dimension {mass.d}")
        mass.check_semidefinite()
        self.provider = provider
        self.mass = mass
        self._states = []
        self._lock = threading.Lock()
        log.info('[Uvarov.Engine]: engine ready for %s mass conditions in dimension %s', mass.N, mass.d)

    def _check_degree(self, n: int) -> None:
        if n < 0 or n > self.provider.max_degree:
            log.error('[Uvarov.Engine]: degree %s outside 0..%s', n, self.provider.max_degree)
            raise InvalidDimension(f"Degree must be in 0..{self.provider.max_degree}, got {n}")

    def _functional_blocks(self, first: int, last: int) -> list:
        """Matrices P_j(xi) for j = first..last, one column per mass condition."""
        columns = []
        for point, order in zip(self.mass.points, self.mass.deriv_orders):
            if order.degree == 0:
                values = self.provider.evaluate_all(last, point)[first:]
            else:
                values = [self.provider.derivative(j, order, point) for j in range(first, last + 1)]
            columns.append(values)
        return [np.column_stack([column[k] for column in columns]) for k in range(last - first + 1)]

    def _factorization_failure(self, n: int, pivot: float, k_mat: np.ndarray):
        diagonal = np.sqrt(np.clip(np.diag(k_mat), np.finfo(float).tiny, None))
        correlation = np.abs(k_mat / np.outer(diagonal, diagonal))
        np.fill_diagonal(correlation, -1.0)
        i, j = np.unravel_index(int(np.argmax(correlation)), correlation.shape)
        if self.mass.N == 1:
            pair = "mass condition 1"
        else:
            pair = (f"mass conditions {i + 1} and {j + 1} "
                    f"(points {self.mass.points[i].tolist()} and {self.mass.points[j].tolist()}, "
                    f"correlation {correlation[i, j]:.6g})")
        log.error('[Uvarov.Engine]: singular system at degree %s, pivot %.3g, %s', n, pivot, pair)
        return FactorizationFailed(f"(I + Lambda K_{n}) is numerically singular (pivot {pivot:.3g}); offending {pair}")

    def _extend(self, target: int) -> None:
        lam = self.mass.mass_matrix
        identity = np.eye(self.mass.N)
        first = len(self._states)
        blocks = self._functional_blocks(first, target)
        for offset, p_xi in enumerate(blocks):
            n = first + offset
            previous = self._states[n - 1] if n > 0 else None
            k_prev = previous.K_mat if previous is not None else np.zeros_like(lam)
            k_mat = k_prev + p_xi.T @ p_xi
            with warnings.catch_warnings():
                warnings.simplefilter('ignore', LinAlgWarning)
                factor = lu_factor(identity + lam @ k_mat)
            pivots = np.abs(np.diag(factor[0]))
            if pivots.min() <= PIVOT_TOLERANCE * max(1.0, float(pivots.max())):
                raise self._factorization_failure(n, float(pivots.min()), k_mat)
            s_n = lu_solve(factor, lam)
            s_nm1 = previous.S_n if previous is not None else lam.copy()
            r = p_xi.shape[0]
            h_block = np.eye(r) + p_xi @ s_nm1 @ p_xi.T
            h_inv = np.eye(r) - p_xi @ s_n @ p_xi.T
            state = DegreeState(
                n=n,
                P_xi=_frozen(p_xi),
                K_mat=_frozen(k_mat),
                solve_n=factor,
                solve_nm1=previous.solve_n if previous is not None else None,
                S_n=_frozen(s_n),
                S_nm1=_frozen(s_nm1),
                H=_frozen(h_block),
                H_inv=_frozen(h_inv),
            )
            self._states.append(state)
            log.debug('[Uvarov.Engine]: built state of degree %s', n)
        log.info('[Uvarov.Engine]: state chain extended to degree %s', target)

    def build_state(self, n: int) -> DegreeState:
        """
        Return the DegreeState of degree n, extending the chain when needed.

        Args:
            :param n (int): The degree, 0 <= n <= provider.max_degree.

        Returns:
            (DegreeState): The frozen state.

        Raises:
            FactorizationFailed: If (I + Lambda K_j) is singular for some j <= n.
        """
        self._check_degree(n)
        if n >= len(self._states):
            with self._lock:
                if n >= len(self._states):
                    self._extend(n)
        return self._states[n]

    def _kernel_vector_from_blocks(self, n: int, blocks: list) -> np.ndarray:
        vector = np.zeros(self.mass.N)
        for j in range(n + 1):
            vector += self._states[j].P_xi.T @ blocks[j]
        return vector

    def kernel_vector(self, n: int, x) -> np.ndarray:
        """
        The vector K_n(xi, x) with component i equal to d^{alpha_i} applied in the first slot of K_n(mu; ., x) at xi_i.
        n = -1 gives the zero vector.
        """
        if n < 0:
            return np.zeros(self.mass.N)
        self.build_state(n)
        return self._kernel_vector_from_blocks(n, self.provider.evaluate_all(n, x))

    def q_eval(self, n: int, x) -> np.ndarray:
        """
        The modified polynomials Q_n(x) = P_n(x) - P_n(xi) (I + Lambda K_{n-1})^{-1} Lambda K_{n-1}(xi, x).

        Q_n shares the leading coefficient of P_n, and Q_0 = P_0.

        Args:
            :param n (int): The degree.
            :param x (array-like): The point.

        Returns:
            (np.ndarray): Vector of length r_n.
        """
        state = self.build_state(n)
        blocks = self.provider.evaluate_all(n, x)
        if n == 0:
            return blocks[0]
        return blocks[n] - state.P_xi @ (state.S_nm1 @ self._kernel_vector_from_blocks(n - 1, blocks))

    def q_coefficients(self, n: int) -> np.ndarray:
        """
        Coefficients of Q_n in the base blocks: an r_n x (r_0 + ... + r_n) matrix C with Q_n = C [P_0; ...; P_n].
        """
        state = self.build_state(n)
        blocks = [-(state.P_xi @ state.S_nm1 @ self._states[j].P_xi.T) for j in range(n)]
        blocks.append(np.eye(state.P_xi.shape[0]))
        return np.hstack(blocks)

    def h_blocks(self, n: int) -> tuple:
        """
        The Gram block H_n = I + P_n(xi) S_{n-1} P_n(xi)^tr and its inverse H_n^{-1} = I - P_n(xi) S_n P_n(xi)^tr,
        each from its own formula.
        """
        state = self.build_state(n)
        return state.H, state.H_inv

    def orthonormal_q_eval(self, n: int, x) -> np.ndarray:
        """The nu-orthonormal block H_n^{-1/2} Q_n(x)."""
        _, h_inv = self.h_blocks(n)
        eigenvalues, vectors = eigh((h_inv + h_inv.T) / 2.0)
        root = (vectors * np.sqrt(np.clip(eigenvalues, 0.0, None))) @ vectors.T
        return root @ self.q_eval(n, x)

    def base_kernel(self, n: int, x, y, cumulative: bool = True) -> float:
        """K_n(mu; x, y) when cumulative, else the projection kernel P_n(mu; x, y)."""
        self._check_degree(n)
        bx = self.provider.evaluate_all(n, x)
        by = self.provider.evaluate_all(n, y)
        if not cumulative:
            return float(bx[n] @ by[n])
        return float(sum(u @ v for u, v in zip(bx, by)))

    def modified_projection_kernel(self, n: int, x, y) -> float:
        """
        P_n(nu; x, y) = P_n(mu; x, y) - K_n(xi,x)^tr S_n K_n(xi,y) + K_{n-1}(xi,x)^tr S_{n-1} K_{n-1}(xi,y).
        """
        state = self.build_state(n)
        bx = self.provider.evaluate_all(n, x)
        by = self.provider.evaluate_all(n, y)
        kx = self._kernel_vector_from_blocks(n, bx)
        ky = self._kernel_vector_from_blocks(n, by)
        value = float(bx[n] @ by[n]) - float(kx @ state.S_n @ ky)
        if n > 0:
            kx_prev = kx - state.P_xi.T @ bx[n]
            ky_prev = ky - state.P_xi.T @ by[n]
            value += float(kx_prev @ state.S_nm1 @ ky_prev)
        return value

    def modified_sum_kernel(self, n: int, x, y) -> float:
        """
        K_n(nu; x, y) = K_n(mu; x, y) - K_n(xi,x)^tr (I + Lambda K_n)^{-1} Lambda K_n(xi,y).
        """
        state = self.build_state(n)
        bx = self.provider.evaluate_all(n, x)
        by = self.provider.evaluate_all(n, y)
        base = float(sum(u @ v for u, v in zip(bx, by)))
        kx = self._kernel_vector_from_blocks(n, bx)
        ky = self._kernel_vector_from_blocks(n, by)
        return base - float(kx @ state.S_n @ ky)

    def christoffel(self, n: int, x) -> float:
        """The modified Christoffel function 1 / K_n(nu; x, x)."""
        return 1.0 / self.modified_sum_kernel(n, x, x)

    def matrix_identity_residuals(self, n: int) -> dict:
        """
        Residuals of the identities satisfied by the state of degree n.

        Returns:
            (dict): max-abs residuals keyed by
                'telescoping' (K_n - K_{n-1} - P_n(xi)^tr P_n(xi), relative to max |K_n|),
                'difference' ((I+LK_{n-1})^{-1} L P^tr P (I+LK_n)^{-1} - (I+LK_{n-1})^{-1} + (I+LK_n)^{-1}),
                'h_inverse' (H_n H_n^{-1} - I) and
                'symmetry' ((I+LK_n)^{-1} L minus its transpose).
        """
        state = self.build_state(n)
        identity = np.eye(self.mass.N)
        lam = self.mass.mass_matrix
        k_prev = self._states[n - 1].K_mat if n > 0 else np.zeros_like(state.K_mat)
        gram = state.P_xi.T @ state.P_xi
        inverse_n = lu_solve(state.solve_n, identity)
        inverse_nm1 = lu_solve(state.solve_nm1, identity) if state.solve_nm1 is not None else identity
        difference = inverse_nm1 @ lam @ gram @ inverse_n - (inverse_nm1 - inverse_n)
        scale = max(1.0, float(np.max(np.abs(state.K_mat))))
        return {
            'telescoping': float(np.max(np.abs(state.K_mat - k_prev - gram))) / scale,
            'difference': float(np.max(np.abs(difference))),
            'h_inverse': float(np.max(np.abs(state.H @ state.H_inv - np.eye(state.H.shape[0])))),
            'symmetry': float(np.max(np.abs(state.S_n - state.S_n.T))),
        }
