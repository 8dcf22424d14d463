"""Quaternion compressed sensing: Gaussian measurement matrices and restricted isometry constants."""

__version__ = "0.1.0"

from .exceptions import (  # noqa: E402
    CapExceededError,
    ConfigError,
    ContractError,
    DimensionError,
    DomainError,
    ParameterError,
    QripError,
    VerificationError,
)
from .quaternion import Quaternion, embed, hermitian_form, matmul, matvec  # noqa: E402
from .linalg import jacobi_eigvalsh, op_norm_hermitian  # noqa: E402
from .sampling import GaussianSpec, RngStream, sample_gaussian_matrix, sample_sparse_unit_vector  # noqa: E402
from .gamma import EmpiricalDistribution, GammaParams, ks_statistic, tail_bound, verify_mgf_bound  # noqa: E402
from .rip import (  # noqa: E402
    covering_count_bound,
    empirical_delta_s,
    empirical_ric_riv,
    exact_delta_s,
    rayleigh_quotient,
    sample_size_fixed_support,
    sample_size_rip,
)
from .estimators import RayleighQuotientTransformer, RestrictedIsometryConstant, RicRivEstimator  # noqa: E402

__all__ = [
    "CapExceededError", "ConfigError", "ContractError", "DimensionError", "DomainError",
    "ParameterError", "QripError", "VerificationError",
    "Quaternion", "embed", "hermitian_form", "matmul", "matvec",
    "jacobi_eigvalsh", "op_norm_hermitian",
    "GaussianSpec", "RngStream", "sample_gaussian_matrix", "sample_sparse_unit_vector",
    "EmpiricalDistribution", "GammaParams", "ks_statistic", "tail_bound", "verify_mgf_bound",
    "covering_count_bound", "empirical_delta_s", "empirical_ric_riv", "exact_delta_s",
    "rayleigh_quotient", "sample_size_fixed_support", "sample_size_rip",
    "RayleighQuotientTransformer", "RestrictedIsometryConstant", "RicRivEstimator",
]
