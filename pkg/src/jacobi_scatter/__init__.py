"""Scattering theory for matrix-valued discrete Schrödinger operators on Z.

The package computes Jost solutions, transmission and reflection matrices,
resolvent kernels with their boundary values on the band (-2, 2), weighted
limiting-absorption bounds, the time-evolution kernel of the absolutely
continuous part, and its dispersive decay rate, for Hermitian block
potentials supported on finitely many lattice sites.  A dense truncated
operator serves as a brute-force oracle for every closed-form quantity.
"""

__version__ = "0.1.0"

from .algebra import (
    MatrixSeq,
    SpectralPoint,
    WienerSeries,
    inverse_zhukovsky,
    mat_norm,
    wiener_norm,
    wiener_product,
    zhukovsky,
)
from .crosscheck import CheckResult, VerifyReport, verify
from .errors import (
    CrossCheckError,
    JacobiScatterError,
    NumericalError,
    ValidationError,
)
from .evolution import (
    DecayFit,
    SpectralDensity,
    dispersive_decay_fit,
    evolution_kernel,
    spectral_density,
    spectral_measure,
)
from .jost import (
    JostSolution,
    TransmutationTable,
    difference_residual,
    jost_series,
    jost_volterra,
    s_kernel,
    solve_cauchy,
    transfer_matrix,
    transmutation_coeffs,
)
from .oracle import (
    PointSpectrumReport,
    TruncatedOperator,
    oracle_point_spectrum,
    oracle_propagator,
    oracle_resolvent,
    truncated_operator,
)
from .potential import (
    DecayNorms,
    Potential,
    decay_norms,
    load_potential,
    potential_norm,
    save_potential,
)
from .resolvent import (
    HolderReport,
    WeightedResolventReport,
    green_boundary,
    green_kernel,
    holder_diagnostic,
    kernel_column,
    kernel_difference_residual,
    kernel_entry,
    weighted_resolvent_norm,
    weighted_resolvent_report,
)
from .scattering import (
    CircleScattering,
    GenericityReport,
    ScatteringData,
    circle_scattering,
    is_generic,
    scattering_matrices,
    scattering_relation_residual,
    wronskian,
    wronskian_constancy_check,
)

__all__ = [
    "CheckResult",
    "CircleScattering",
    "CrossCheckError",
    "DecayFit",
    "DecayNorms",
    "GenericityReport",
    "HolderReport",
    "JacobiScatterError",
    "JostSolution",
    "MatrixSeq",
    "NumericalError",
    "PointSpectrumReport",
    "Potential",
    "ScatteringData",
    "SpectralDensity",
    "SpectralPoint",
    "TransmutationTable",
    "TruncatedOperator",
    "ValidationError",
    "VerifyReport",
    "WeightedResolventReport",
    "WienerSeries",
    "circle_scattering",
    "decay_norms",
    "difference_residual",
    "dispersive_decay_fit",
    "evolution_kernel",
    "green_boundary",
    "green_kernel",
    "holder_diagnostic",
    "inverse_zhukovsky",
    "is_generic",
    "jost_series",
    "jost_volterra",
    "kernel_column",
    "kernel_difference_residual",
    "kernel_entry",
    "load_potential",
    "mat_norm",
    "oracle_point_spectrum",
    "oracle_propagator",
    "oracle_resolvent",
    "potential_norm",
    "s_kernel",
    "save_potential",
    "scattering_matrices",
    "scattering_relation_residual",
    "solve_cauchy",
    "spectral_density",
    "spectral_measure",
    "transfer_matrix",
    "transmutation_coeffs",
    "truncated_operator",
    "verify",
    "wiener_norm",
    "wiener_product",
    "wronskian",
    "wronskian_constancy_check",
    "zhukovsky",
]
