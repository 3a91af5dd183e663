"""
This module provides one-dimensional classical special functions:
Jacobi and Gegenbauer polynomials, their orthonormal values and derivatives,
and the shifted factorial helpers behind every closed-form constant of the package.
"""
import math
from dataclasses import dataclass
import numpy as np
from scipy.special import gammaln
from logger import log
from .exceptions import InvalidParameters


@dataclass(frozen=True)
class JacobiParams:
    """
    Parameters (a, b) of the Jacobi weight (1-t)^a (1+t)^b on [-1, 1].

    Attributes:
        a (float): Exponent at t = 1, a > -1.
        b (float): Exponent at t = -1, b > -1.

    Raises:
        InvalidParameters: If a <= -1 or b <= -1.

    Examples:
        >>> JacobiParams(-0.5, -0.5)
        JacobiParams(a=-0.5, b=-0.5)
    """
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > -1.0 and self.b > -1.0):
            log.error('[Uvarov.Jacobi]: invalid parameters a=%s b=%s', self.a, self.b)
            raise InvalidParameters(f"Jacobi parameters must satisfy a > -1 and b > -1, got a={self.a}, b={self.b}")

    def swapped(self) -> 'JacobiParams':
        """The reflected parameters (b, a)."""
        return JacobiParams(self.b, self.a)


@dataclass(frozen=True)
class GegenbauerParams:
    """
    Index lam > 0 of the Gegenbauer weight (1-t^2)^(lam-1/2).

    Raises:
        InvalidParameters: If lam <= 0.
    """
    lam: float

    def __post_init__(self) -> None:
        if not self.lam > 0.0:
            log.error('[Uvarov.Jacobi]: invalid Gegenbauer index %s', self.lam)
            raise InvalidParameters(f"Gegenbauer index must be positive, got {self.lam}")


def pochhammer(a: float, k: int) -> float:
    """
    Shifted factorial (a)_k = a(a+1)...(a+k-1) by running product.

    Args:
        :param a (float): The base.
        :param k (int): Number of factors, k >= 0.

    Returns:
        (float): The product; (a)_0 = 1.

    Examples:
        >>> pochhammer(3, 2)
        12.0
    """
    if k < 0:
        raise InvalidParameters(f"Pochhammer length must be nonnegative, got {k}")
    result = 1.0
    for i in range(k):
        result *= a + i
    return result


def pochhammer_ratio(a: float, b: float, k: int) -> float:
    """
    Ratio (a)_k / (b)_k accumulated factor by factor, which stays finite where both symbols overflow.

    Examples:
        >>> pochhammer_ratio(1.5, 0.5, 3)
        7.0
    """
    if k < 0:
        raise InvalidParameters(f"Pochhammer length must be nonnegative, got {k}")
    result = 1.0
    for i in range(k):
        result *= (a + i) / (b + i)
    return result


def homogeneous_recurrence(a, b, n: int, t, s):
    """
    Yield H_0, ..., H_n of the homogeneous Jacobi form H_k(t, s) = s^k P_k^{(a,b)}(t/s).

    The recurrence only multiplies, adds and divides by constants, so t and s may be floats,
    numpy arrays (with a and b broadcast against them) or MonomialPoly objects.
    At s = 0 the form stays finite, which is how faces of the simplex are evaluated by continuity.

    Args:
        :param a: First Jacobi parameter (float or array).
        :param b: Second Jacobi parameter (float or array).
        :param n (int): Highest degree to produce.
        :param t: Homogenized argument.
        :param s: Homogenizing variable; s = 1 gives the ordinary polynomial.

    Yields:
        The forms H_0, ..., H_n.
    """
    h_prev = t * 0.0 + 1.0
    yield h_prev
    if n == 0:
        return
    h_curr = (a + 1.0) * s + (a + b + 2.0) * (t - s) / 2.0
    yield h_curr
    ab = a + b
    for k in range(1, n):
        c0 = 2.0 * (k + 1) * (k + ab + 1.0) * (2 * k + ab)
        c1 = 2 * k + ab + 1.0
        c2 = (2 * k + ab + 2.0) * (2 * k + ab)
        c3 = a * a - b * b
        c4 = 2.0 * (k + a) * (k + b) * (2 * k + ab + 2.0)
        h_next = (c1 * (c2 * t + c3 * s) * h_curr - c4 * (s * s) * h_prev) / c0
        h_prev, h_curr = h_curr, h_next
        yield h_curr


def jacobi_table(a, b, n: int, t, s=1.0) -> np.ndarray:
    """Stack H_0..H_n of the homogeneous form into an array of shape (n + 1, ...)."""
    return np.stack([np.asarray(h, dtype=float) * np.ones(np.broadcast(a, b, t, s).shape)
                     for h in homogeneous_recurrence(a, b, n, t, s)])


def _as_output(value):
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value


def jacobi_eval(p: JacobiParams, n: int, t):
    """
    Classical Jacobi polynomial P_n^{(a,b)}(t) with P_n^{(a,b)}(1) = C(n+a, n).

    Args:
        :param p (JacobiParams): The parameters.
        :param n (int): Degree, n >= 0.
        :param t (float | np.ndarray): Argument; values outside [-1, 1] give the polynomial extension.

    Returns:
        (float | np.ndarray): The values.

    Examples:
        >>> jacobi_eval(JacobiParams(0.0, 0.0), 2, 1.0)
        1.0
    """
    if n < 0:
        raise InvalidParameters(f"Degree must be nonnegative, got {n}")
    t = np.asarray(t, dtype=float)
    value = None
    for value in homogeneous_recurrence(p.a, p.b, n, t, 1.0):
        pass
    return _as_output(value)


def jacobi_log_norm_constant(a, b, n):
    """
    Logarithm of the constant c_n making c_n P_n^{(a,b)} orthonormal for the probability-normalized
    weight (1-t)^a (1+t)^b / (2^{a+b+1} B(a+1, b+1)).

    The squared norm of P_n under that weight is
    Gamma(n+a+1) Gamma(n+b+1) Gamma(a+b+2) / ((2n+a+b+1) Gamma(n+a+b+1) n! Gamma(a+1) Gamma(b+1)),
    and c_0 = 1. Arguments broadcast as numpy arrays.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = np.asarray(n, dtype=float)
    # n = 0 is patched below; a + b + 1 may vanish there
    safe = np.maximum(n, 1.0)
    log_norm = (gammaln(safe + a + 1.0) + gammaln(safe + b + 1.0) + gammaln(a + b + 2.0)
                - np.log(2.0 * safe + a + b + 1.0) - gammaln(safe + a + b + 1.0) - gammaln(safe + 1.0)
                - gammaln(a + 1.0) - gammaln(b + 1.0))
    return _as_output(np.where(n == 0, 0.0, -0.5 * log_norm))


def jacobi_norm_constant(a, b, n):
    """The constant c_n itself; see jacobi_log_norm_constant."""
    return _as_output(np.exp(jacobi_log_norm_constant(a, b, n)))


def jacobi_orthonormal_eval(p: JacobiParams, n: int, t):
    """
    Orthonormal Jacobi polynomial p_n^{(a,b)}(t) = c_n P_n^{(a,b)}(t) for the probability-normalized weight.

    Examples:
        >>> round(jacobi_orthonormal_eval(JacobiParams(-0.5, -0.5), 1, 0.5), 12)
        0.707106781187
    """
    return _as_output(jacobi_norm_constant(p.a, p.b, n) * np.asarray(jacobi_eval(p, n, t)))


def jacobi_derivative(p: JacobiParams, n: int, k: int, t):
    """
    k-th derivative of P_n^{(a,b)} from d/dt P_n^{(a,b)} = (n+a+b+1)/2 P_{n-1}^{(a+1,b+1)} applied k times.

    Returns zero when k > n.
    """
    if k < 0:
        raise InvalidParameters(f"Derivative order must be nonnegative, got {k}")
    t = np.asarray(t, dtype=float)
    if k > n:
        return _as_output(np.zeros_like(t))
    factor = pochhammer(n + p.a + p.b + 1.0, k) / 2.0 ** k
    return _as_output(factor * np.asarray(jacobi_eval(JacobiParams(p.a + k, p.b + k), n - k, t)))


def gegenbauer_eval(g: GegenbauerParams, n: int, t):
    """
    Gegenbauer polynomial C_n^lam(t), normalized by C_n^lam(1) = C(n + 2 lam - 1, n).

    Examples:
        >>> gegenbauer_eval(GegenbauerParams(1.0), 2, 0.5)
        0.0
    """
    if n < 0:
        raise InvalidParameters(f"Degree must be nonnegative, got {n}")
    t = np.asarray(t, dtype=float)
    lam = g.lam
    c_prev = np.ones_like(t)
    if n == 0:
        return _as_output(c_prev)
    c_curr = 2.0 * lam * t
    for k in range(1, n):
        c_prev, c_curr = c_curr, (2.0 * (k + lam) * t * c_curr - (k + 2.0 * lam - 1.0) * c_prev) / (k + 1)
    return _as_output(c_curr)


def jacobi_estimate_constant(p: JacobiParams, degrees, grid) -> float:
    """
    Fit the single constant c of the pointwise bound
    |P_n^{(a,b)}(t)| <= c n^{-1/2} (1 - t + n^{-2})^{-(a+1/2)/2} on [0, 1].

    Args:
        :param p (JacobiParams): The parameters.
        :param degrees (iterable): Degrees n >= 1 of the sweep.
        :param grid (iterable): Points t of [0, 1].

    Returns:
        (float): The smallest c that makes the bound hold over the sweep.
    """
    grid = np.asarray(list(grid), dtype=float)
    if grid.size == 0 or grid.min() < 0.0 or grid.max() > 1.0:
        raise InvalidParameters("The estimate grid must be a nonempty subset of [0, 1]")
    constant = 0.0
    for n in degrees:
        if n < 1:
            raise InvalidParameters(f"Estimate degrees must be positive, got {n}")
        values = np.abs(np.asarray(jacobi_eval(p, n, grid)))
        scale = math.sqrt(n) * (1.0 - grid + float(n) ** -2) ** ((p.a + 0.5) / 2.0)
        constant = max(constant, float(np.max(values * scale)))
    log.debug('[Uvarov.Jacobi]: fitted estimate constant %.6g for a=%s b=%s', constant, p.a, p.b)
    return constant
