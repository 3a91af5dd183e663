"""
Custom exceptions for the Uvarov package.
"""


class InvalidDimension(Exception):
    """
    Raised when a dimension or a degree is out of range, or when operands do not share a dimension.

    Args:
        message (str): The error message.

    Example:
        >>> try:
        ...     raise InvalidDimension("Dimension must be at least 1")
        ... except InvalidDimension as e:
        ...     print(e)
        Dimension must be at least 1
    """
    def __init__(self, message):
        self.message = message
        super().__init__(message)


class InvalidParameters(Exception):
    """
    Raised when the parameters of a weight, a mass specification or a vertex index are invalid.

    Args:
        message (str): The error message.

    Example:
        >>> try:
        ...     raise InvalidParameters("kappa_i must be nonnegative")
        ... except InvalidParameters as e:
        ...     print(e)
        kappa_i must be nonnegative
    """
    def __init__(self, message):
        self.message = message
        super().__init__(message)


class PointOutsideSimplex(Exception):
    """
    Raised when an evaluation point lies outside the simplex beyond the domain tolerance.

    Args:
        message (str): The error message.

    Example:
        >>> try:
        ...     raise PointOutsideSimplex("Point (0.7, 0.6) is outside the simplex")
        ... except PointOutsideSimplex as e:
        ...     print(e)
        Point (0.7, 0.6) is outside the simplex
    """
    def __init__(self, message):
        self.message = message
        super().__init__(message)


class DerivativeOrderNotSupported(Exception):
    """
    Raised when a derivative of total order above the supported maximum is requested.

    Args:
        message (str): The error message.

    Example:
        >>> try:
        ...     raise DerivativeOrderNotSupported("Derivative order 3 is not supported")
        ... except DerivativeOrderNotSupported as e:
        ...     print(e)
        Derivative order 3 is not supported
    """
    def __init__(self, message):
        self.message = message
        super().__init__(message)


class MonomialCeilingExceeded(Exception):
    """
    Raised when a polynomial of too high a degree is requested in the monomial representation.

    Args:
        message (str): The error message.

    Example:
        >>> try:
        ...     raise MonomialCeilingExceeded("Degree 30 exceeds the monomial ceiling 20")
        ... except MonomialCeilingExceeded as e:
        ...     print(e)
        Degree 30 exceeds the monomial ceiling 20
    """
    def __init__(self, message):
        self.message = message
        super().__init__(message)


class IndefiniteMassMatrix(Exception):
    """
    Raised when the mass matrix is not symmetric positive semidefinite.

    Args:
        message (str): The error message.

    Example:
        >>> try:
        ...     raise IndefiniteMassMatrix("Mass matrix has a negative eigenvalue -1.0")
        ... except IndefiniteMassMatrix as e:
        ...     print(e)
        Mass matrix has a negative eigenvalue -1.0
    """
    def __init__(self, message):
        self.message = message
        super().__init__(message)


class FactorizationFailed(Exception):
    """
    Raised when a dense factorization fails: a singular (I + Lambda K_n) or a singular moment Gram matrix.

    Args:
        message (str): The error message.

    Example:
        >>> try:
        ...     raise FactorizationFailed("Singular system at degree 3, mass conditions 1 and 2")
        ... except FactorizationFailed as e:
        ...     print(e)
        Singular system at degree 3, mass conditions 1 and 2
    """
    def __init__(self, message):
        self.message = message
        super().__init__(message)


class CalibrationMismatch(Exception):
    """
    Raised when a normalization constant disagrees with its exact-moment or basis-sum reference.

    Args:
        message (str): The error message.

    Example:
        >>> try:
        ...     raise CalibrationMismatch("Gram matrix deviates from identity by 1e-3")
        ... except CalibrationMismatch as e:
        ...     print(e)
        Gram matrix deviates from identity by 1e-3
    """
    def __init__(self, message):
        self.message = message
        super().__init__(message)


class QuadratureOrderTooSmall(Exception):
    """
    Raised when the Gauss-Jacobi rule cannot integrate the kernel integrand exactly.

    Args:
        message (str): The error message.

    Example:
        >>> try:
        ...     raise QuadratureOrderTooSmall("Quadrature order 3 is below n + 1 = 5")
        ... except QuadratureOrderTooSmall as e:
        ...     print(e)
        Quadrature order 3 is below n + 1 = 5
    """
    def __init__(self, message):
        self.message = message
        super().__init__(message)


class ConfigurationError(Exception):
    """
    Raised when the run configuration or the command line arguments are malformed.

    Args:
        message (str): The error message.

    Example:
        >>> try:
        ...     raise ConfigurationError("Field 'd' is required")
        ... except ConfigurationError as e:
        ...     print(e)
        Field 'd' is required
    """
    def __init__(self, message):
        self.message = message
        super().__init__(message)
