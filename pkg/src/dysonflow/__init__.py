"""Spectral dynamics of diffusing Hermitian matrices.

Core objects: stochastic matrix evolution and Monte Carlo averages
(ensemble), exact evaluators for the averaged characteristic polynomial
and its reciprocal (evaluators), the large-dimension characteristic flow
with caustics (flow), edge and cusp scaling limits (asymptotics), and
determinantal kernels with an external source (kernels).
"""

from .asymptotics import (
    ScalingWindow,
    acp_cusp_limit,
    acp_cusp_profile,
    acp_edge_limit,
    acp_edge_profile,
    aicp_cusp_limit,
    aicp_cusp_profile,
    aicp_edge_limit,
    aicp_edge_profile,
    airy,
    airy_series,
    cusp_window,
    edge_window,
    pearcey,
    pearcey_quarter,
    spacing_exponent,
)
from .contours import ContourSpec, QuadratureResult, contour_quadrature
from .ensemble import (
    HermitianState,
    McEstimate,
    eigenvalues,
    empirical_density,
    mc_acp,
    mc_aicp,
    sample_static,
    step_diffusion,
)
from .errors import (
    BranchAmbiguityError,
    ConfigurationError,
    ConvergenceError,
    DomainError,
    DysonflowError,
    PreconditionError,
)
from .evaluators import (
    PdeResidual,
    PolynomialEvaluation,
    acp,
    acp_hermite_recurrence,
    acp_pair_series,
    aicp,
    aicp_cauchy_null,
    cole_hopf,
    cusp_contour,
    edge_contour,
    pde_residual,
)
from .flow import (
    CausticSet,
    GreenEvaluation,
    caustics,
    density,
    green0,
    merge_point,
    saddle_exponent,
    solve_characteristics,
    support_intervals,
)
from .kernels import (
    MultiplicityChain,
    kernel,
    kernel_bh,
    pi_fn,
    source_sum_identity,
    theta_fn,
)
from .logscale import ScaledComplex, scaled_sum
from .sources import SourceSpectrum

__version__ = "0.1.0"

__all__ = [
    "SourceSpectrum",
    "ContourSpec",
    "QuadratureResult",
    "contour_quadrature",
    "ScaledComplex",
    "scaled_sum",
    "PolynomialEvaluation",
    "PdeResidual",
    "acp",
    "acp_hermite_recurrence",
    "acp_pair_series",
    "aicp",
    "aicp_cauchy_null",
    "edge_contour",
    "cusp_contour",
    "pde_residual",
    "cole_hopf",
    "GreenEvaluation",
    "CausticSet",
    "green0",
    "solve_characteristics",
    "density",
    "caustics",
    "support_intervals",
    "merge_point",
    "saddle_exponent",
    "HermitianState",
    "McEstimate",
    "step_diffusion",
    "sample_static",
    "eigenvalues",
    "mc_acp",
    "mc_aicp",
    "empirical_density",
    "airy",
    "airy_series",
    "pearcey",
    "pearcey_quarter",
    "ScalingWindow",
    "spacing_exponent",
    "edge_window",
    "cusp_window",
    "acp_edge_profile",
    "acp_edge_limit",
    "aicp_edge_profile",
    "aicp_edge_limit",
    "acp_cusp_profile",
    "acp_cusp_limit",
    "aicp_cusp_profile",
    "aicp_cusp_limit",
    "MultiplicityChain",
    "theta_fn",
    "pi_fn",
    "kernel",
    "kernel_bh",
    "source_sum_identity",
    "DysonflowError",
    "DomainError",
    "PreconditionError",
    "ConvergenceError",
    "ConfigurationError",
    "BranchAmbiguityError",
    "__version__",
]
