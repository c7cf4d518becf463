"""specband: a numerical laboratory for spectral subspaces of elliptic operators.

Build flux-form discretizations of H_a = -sum d_j a_jk d_k on periodic grids,
compute reproducing kernels of the band projections chi_[0,Omega](H_a),
measure weighted Beurling densities of point sets, and test sampling and
interpolation stability against the constant-coefficient oracles.
"""

from .grid import GridSpec, OffGridError
from .symbol import (
    BandwidthProfile1d,
    Constant,
    EllipticityError,
    GaussianBump,
    OscillationReport,
    RecipeError,
    SlowOscillation,
    SymbolField,
    make_symbol,
    oscillation_report,
    recipe_from_dict,
    translate_symbol,
)
from .operator import DiscreteOperator, StencilError, conjugated_operator, discretize
from .spectral import (
    BernsteinReport,
    BernsteinViolation,
    DyadicReport,
    DyadicViolation,
    EigendecompositionError,
    HeatKernelResult,
    KernelMatrix,
    ResourceCapError,
    SpectralData,
    bernstein_check,
    dyadic_lower_bound_check,
    eigendecompose,
    functional_calculus,
    heat_kernel,
    reproducing_kernel,
)
from .constcoef import (
    Ellipsoid,
    ellipsoid_volume,
    periodic_mode_count,
    periodic_pw_kernel,
    periodic_pw_kernel_grid,
    pw_kernel_exact,
    schur_row_bound,
    sobolev_kernel_gram,
    sobolev_kernel_gram_quadrature,
    unit_ball_volume,
)
from .geometry import (
    ConversionDisagreement,
    ConversionReport,
    DensityCurve,
    PointGenerationError,
    PointSet,
    RadiusError,
    TraceCurve,
    WeightField,
    averaged_trace,
    ball_measure,
    beurling_density,
    density_conversion_check,
    generate_points,
    make_weight,
    separation_report,
)
from .analysis import (
    ApproxIdentityReport,
    FrameReport,
    LimitKernelCurve,
    approx_identity_check,
    frame_bounds,
    hap_check,
    limit_kernel_convergence,
    riesz_lower_bound,
    stability_report,
    weak_localization_curve,
)

__version__ = "0.1.0"
