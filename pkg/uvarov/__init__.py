"""
This module contains the implementation of the Uvarov package,
which builds orthogonal polynomials and reproducing kernels for measures modified by mass points,
with a complete instantiation for the Jacobi weight on the simplex.
"""

from .uvarov_engine import BasisProvider, DegreeState, MassSpec, UvarovEngine
from .simplex_basis import BasisSpec, SimplexJacobiParams, basis_eval, basis_partial_deriv
from .kernels import (
    KernelMethod,
    KernelValue,
    Normalization,
    christoffel,
    kernel_integral_form,
    kernel_sum_eval,
    kernel_vertex_closed_form,
    vertex_constants,
)
from .simplex_mass import (
    KernelTable,
    VertexMassModel,
    asymptotic_difference,
    face_limit_table,
    vertex_mass_kernel,
    vertex_mass_q_eval,
)
from .oracle import NuInnerProduct, build_oracle, equivalence_report, nu_pair, oracle_kernel, verification_suite
from .polycore import MonomialPoly, MultiIndex, dims
from .config import RunConfig
from .constants import MONOMIAL_DEGREE_CEILING, THREADS_ENV_VAR, VERIFY_TOLERANCE
from .exceptions import (
    CalibrationMismatch,
    ConfigurationError,
    DerivativeOrderNotSupported,
    FactorizationFailed,
    IndefiniteMassMatrix,
    InvalidDimension,
    InvalidParameters,
    MonomialCeilingExceeded,
    PointOutsideSimplex,
    QuadratureOrderTooSmall,
)

__all__ = [
    'BasisProvider',
    'DegreeState',
    'MassSpec',
    'UvarovEngine',
    'BasisSpec',
    'SimplexJacobiParams',
    'basis_eval',
    'basis_partial_deriv',
    'KernelMethod',
    'KernelValue',
    'Normalization',
    'christoffel',
    'kernel_integral_form',
    'kernel_sum_eval',
    'kernel_vertex_closed_form',
    'vertex_constants',
    'KernelTable',
    'VertexMassModel',
    'asymptotic_difference',
    'face_limit_table',
    'vertex_mass_kernel',
    'vertex_mass_q_eval',
    'NuInnerProduct',
    'build_oracle',
    'equivalence_report',
    'nu_pair',
    'oracle_kernel',
    'verification_suite',
    'MonomialPoly',
    'MultiIndex',
    'dims',
    'RunConfig',
    'MONOMIAL_DEGREE_CEILING',
    'THREADS_ENV_VAR',
    'VERIFY_TOLERANCE',
    'CalibrationMismatch',
    'ConfigurationError',
    'DerivativeOrderNotSupported',
    'FactorizationFailed',
    'IndefiniteMassMatrix',
    'InvalidDimension',
    'InvalidParameters',
    'MonomialCeilingExceeded',
    'PointOutsideSimplex',
    'QuadratureOrderTooSmall',
]
