"""
This module provides multi-index enumeration, dimension formulas of polynomial spaces
and a sparse-stored monomial representation of polynomials in several variables.
"""
import math
from dataclasses import dataclass, field
from functools import lru_cache
from logger import log
from .exceptions import InvalidDimension, InvalidParameters


@dataclass(frozen=True)
class MultiIndex:
    """
    An exponent vector alpha in N_0^d together with its total degree |alpha|.

    Attributes:
        exponents (tuple): The nonnegative exponents (alpha_1, ..., alpha_d).
        degree (int): The total degree |alpha|, computed at construction.

    Examples:
        >>> alpha = MultiIndex((2, 0, 1))
        >>> alpha.degree
        3
    """
    exponents: tuple
    degree: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        exponents = tuple(int(e) for e in self.exponents)
        if not exponents:
            raise InvalidDimension("A multi-index needs at least one coordinate")
        if any(e < 0 for e in exponents):
            raise InvalidParameters(f"Multi-index exponents must be nonnegative, got {exponents}")
        object.__setattr__(self, 'exponents', exponents)
        object.__setattr__(self, 'degree', sum(exponents))

    @property
    def d(self) -> int:
        """Number of variables."""
        return len(self.exponents)

    @classmethod
    def zero(cls, d: int) -> 'MultiIndex':
        """The zero multi-index in d variables."""
        return cls((0,) * d)

    @classmethod
    def unit(cls, d: int, i: int) -> 'MultiIndex':
        """The unit multi-index e_i (1-based) in d variables."""
        exponents = [0] * d
        exponents[i - 1] = 1
        return cls(tuple(exponents))

    def __add__(self, other: 'MultiIndex') -> 'MultiIndex':
        if self.d != other.d:
            raise InvalidDimension(f"Cannot add multi-indices of dimensions {self.d} and {other.d}")
        return MultiIndex(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __str__(self) -> str:
        return " ".join(str(e) for e in self.exponents)


@dataclass(frozen=True)
class DegreeLayout:
    """
    All multi-indices of total degree n in d variables, in graded reverse-lexicographic order.

    Attributes:
        d (int): Number of variables.
        n (int): The total degree.
        indices (tuple): The ordered multi-indices; its length is r_n^d = C(n+d-1, n).
    """
    d: int
    n: int
    indices: tuple

    def __len__(self) -> int:
        return len(self.indices)

    def position(self, alpha: MultiIndex) -> int:
        """Position of alpha inside the layout."""
        return self.indices.index(alpha)


def _check_dimension(d: int, n: int) -> None:
    if d < 1:
        log.error('[Uvarov.Polycore]: invalid dimension d=%s', d)
        raise InvalidDimension(f"Dimension must be at least 1, got d={d}")
    if n < 0:
        log.error('[Uvarov.Polycore]: invalid degree n=%s', n)
        raise InvalidDimension(f"Degree must be nonnegative, got n={n}")


def _compositions(n: int, d: int):
    if d == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, d - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def enumerate_degree(d: int, n: int) -> DegreeLayout:
    """
    Enumerate all multi-indices with |alpha| = n in graded reverse-lexicographic order.

    Args:
        :param d (int): Number of variables, d >= 1.
        :param n (int): Total degree, n >= 0.

    Returns:
        (DegreeLayout): The layout; stable across calls.

    Examples:
        >>> [a.exponents for a in enumerate_degree(2, 2).indices]
        [(2, 0), (1, 1), (0, 2)]
    """
    _check_dimension(d, n)
    # reverse-lex: compare from the last coordinate, smaller last exponent first
    exponents = sorted(_compositions(n, d), key=lambda e: tuple(reversed(e)))
    return DegreeLayout(d=d, n=n, indices=tuple(MultiIndex(e) for e in exponents))


def dims(d: int, n: int) -> tuple:
    """
    Dimensions of the homogeneous component and of the full space of polynomials of degree <= n.

    Args:
        :param d (int): Number of variables, d >= 1.
        :param n (int): Degree, n >= 0.

    Returns:
        (tuple): (r, total) with r = C(n+d-1, n) and total = C(n+d, n).

    Examples:
        >>> dims(2, 3)
        (4, 10)
    """
    _check_dimension(d, n)
    return math.comb(n + d - 1, n), math.comb(n + d, n)


@lru_cache(maxsize=None)
def graded_monomials(d: int, n: int) -> tuple:
    """All multi-indices of degree <= n, degree by degree, each block in layout order."""
    _check_dimension(d, n)
    return tuple(alpha for j in range(n + 1) for alpha in enumerate_degree(d, j).indices)


def monomial_value(alpha: MultiIndex, x) -> float:
    """Value of x^alpha."""
    return math.prod(float(xi) ** e for xi, e in zip(x, alpha.exponents))


class MonomialPoly:
    """
    A polynomial in d variables stored as a map from MultiIndex to a real coefficient.
    Zero coefficients are never stored.

    Attributes:
        d (int): Number of variables.
        coefficients (dict): MultiIndex -> float.

    Methods:
        add: Sum of two polynomials.
        scale: Product with a real number.
        multiply: Product of two polynomials.
        partial_derivative: Apply d^alpha termwise.
        evaluate: Value at a point by direct summation.

    Raises:
        InvalidDimension: If operands do not share a dimension.

    Examples:
        >>> x1, x2 = MonomialPoly.variable(2, 1), MonomialPoly.variable(2, 2)
        >>> (x1 * x2).evaluate((2.0, 3.0))
        6.0
    """
    __slots__ = ('d', 'coefficients')
    # numpy scalars defer to the reflected operators below
    __array_ufunc__ = None

    def __init__(self, d: int, coefficients: dict = None) -> None:
        if d < 1:
            raise InvalidDimension(f"Dimension must be at least 1, got d={d}")
        self.d = d
        self.coefficients = {}
        for alpha, value in (coefficients or {}).items():
            if not isinstance(alpha, MultiIndex):
                alpha = MultiIndex(alpha)
            if alpha.d != d:
                raise InvalidDimension(f"Multi-index {alpha.exponents} does not have dimension {d}")
            if value != 0.0:
                self.coefficients[alpha] = float(value)

    @classmethod
    def constant(cls, d: int, value: float) -> 'MonomialPoly':
        """The constant polynomial."""
        return cls(d, {MultiIndex.zero(d): value})

    @classmethod
    def variable(cls, d: int, i: int) -> 'MonomialPoly':
        """The coordinate polynomial x_i (1-based)."""
        return cls(d, {MultiIndex.unit(d, i): 1.0})

    @classmethod
    def monomial(cls, alpha: MultiIndex, value: float = 1.0) -> 'MonomialPoly':
        """The polynomial value * x^alpha."""
        return cls(alpha.d, {alpha: value})

    @property
    def degree(self) -> int:
        """Maximal total degree with a nonzero coefficient; -1 for the zero polynomial."""
        return max((alpha.degree for alpha in self.coefficients), default=-1)

    def _check(self, other: 'MonomialPoly') -> None:
        if self.d != other.d:
            log.error('[Uvarov.Polycore]: dimension mismatch %s != %s', self.d, other.d)
            raise InvalidDimension(f"Polynomials have different dimensions {self.d} and {other.d}")

    def add(self, other: 'MonomialPoly') -> 'MonomialPoly':
        """Sum of two polynomials."""
        self._check(other)
        result = dict(self.coefficients)
        for alpha, value in other.coefficients.items():
            result[alpha] = result.get(alpha, 0.0) + value
        return MonomialPoly(self.d, result)

    def scale(self, factor: float) -> 'MonomialPoly':
        """Product with a real number."""
        return MonomialPoly(self.d, {alpha: factor * value for alpha, value in self.coefficients.items()})

    def multiply(self, other: 'MonomialPoly') -> 'MonomialPoly':
        """Product of two polynomials."""
        self._check(other)
        result = {}
        for alpha, a in self.coefficients.items():
            for beta, b in other.coefficients.items():
                key = tuple(i + j for i, j in zip(alpha.exponents, beta.exponents))
                result[key] = result.get(key, 0.0) + a * b
        return MonomialPoly(self.d, {MultiIndex(key): value for key, value in result.items()})

    def partial_derivative(self, alpha: MultiIndex) -> 'MonomialPoly':
        """
        Apply the differential operator d^alpha termwise.

        Args:
            :param alpha (MultiIndex): The derivative orders per variable.

        Returns:
            (MonomialPoly): The derivative.

        Examples:
            >>> p = MonomialPoly(2, {(2, 1): 1.0})
            >>> p.partial_derivative(MultiIndex((1, 0))).coefficients
            {MultiIndex(exponents=(1, 1), degree=2): 2.0}
        """
        if alpha.d != self.d:
            raise InvalidDimension(f"Derivative multi-index has dimension {alpha.d}, expected {self.d}")
        result = {}
        for beta, value in self.coefficients.items():
            if any(b < a for a, b in zip(alpha.exponents, beta.exponents)):
                continue
            factor = math.prod(math.perm(b, a) for a, b in zip(alpha.exponents, beta.exponents))
            key = MultiIndex(tuple(b - a for a, b in zip(alpha.exponents, beta.exponents)))
            result[key] = result.get(key, 0.0) + factor * value
        return MonomialPoly(self.d, result)

    def evaluate(self, x) -> float:
        """Value at the point x by direct summation of all terms."""
        if len(x) != self.d:
            raise InvalidDimension(f"Point has dimension {len(x)}, expected {self.d}")
        return math.fsum(value * monomial_value(alpha, x) for alpha, value in self.coefficients.items())

    def coefficient_vector(self, indices) -> list:
        """Coefficients listed along the given multi-indices; terms outside the list are dropped."""
        return [self.coefficients.get(alpha, 0.0) for alpha in indices]

    def __add__(self, other):
        if isinstance(other, MonomialPoly):
            return self.add(other)
        return self.add(MonomialPoly.constant(self.d, float(other)))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, MonomialPoly):
            return self.add(other.scale(-1.0))
        return self.add(MonomialPoly.constant(self.d, -float(other)))

    def __rsub__(self, other):
        return self.scale(-1.0).add(MonomialPoly.constant(self.d, float(other)))

    def __neg__(self):
        return self.scale(-1.0)

    def __mul__(self, other):
        if isinstance(other, MonomialPoly):
            return self.multiply(other)
        return self.scale(float(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.scale(1.0 / float(other))

    def __eq__(self, other) -> bool:
        return isinstance(other, MonomialPoly) and self.d == other.d and self.coefficients == other.coefficients

    def __hash__(self):
        return hash((self.d, frozenset(self.coefficients.items())))

    def __repr__(self) -> str:
        return f"MonomialPoly(d={self.d}, terms={len(self.coefficients)}, degree={self.degree})"
