"""
This module contains constant values used in the application.
"""

# Geometry tolerances
DOMAIN_TOLERANCE = 1e-12
BARYCENTRIC_TOLERANCE = 1e-12
FACE_TOLERANCE = 1e-12

# Basis normalization cross-check against exact moments
CALIBRATION_CHECK_DEGREE = 4
CALIBRATION_TOLERANCE = 1e-8

# Monomial representation limits
MONOMIAL_DEGREE_CEILING = 20
MAX_DERIVATIVE_ORDER = 2

# Largest monomial system the verification suite factorizes exactly
EXACT_ORACLE_MAX_MONOMIALS = 120

# Quadrature for the integral representation of the kernel: 2n + padding points per axis
QUADRATURE_PADDING = 8
MAX_QUADRATURE_NODES = 4_000_000

# Bases whose closed-form calibration factor stays cached
CALIBRATION_CACHE_SIZE = 16

# Linear algebra thresholds
SYMMETRY_TOLERANCE = 1e-12
SEMIDEFINITE_TOLERANCE = 1e-12
PIVOT_TOLERANCE = 1e-14
ORACLE_PIVOT_THRESHOLD = 1e-13

# Limit estimation over dyadic degrees
LIMIT_CONVERGENCE_TOLERANCE = 0.02

# Verification suite default tolerance
VERIFY_TOLERANCE = 1e-8

# Sweep parallelism
THREADS_ENV_VAR = "UVAROV_MVOP_THREADS"

# Output formats
FLOAT_FORMAT = ".17g"
OUTPUT_FORMATS = ("csv", "json")
KERNEL_TABLE_HEADER = (
    "d", "sigma", "M", "n", "point_id", "face_k", "K_base", "K_nu", "diff",
    "rhs_model", "ratio", "binom_scaled_base", "binom_scaled_nu",
)
REPORT_HEADER = ("check", "degree", "max_abs", "max_rel", "passed")

# CLI exit codes
EXIT_OK = 0
EXIT_VALIDATION_ERROR = 1
EXIT_NUMERICAL_FAILURE = 2
