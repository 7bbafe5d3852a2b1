"""Numerical laboratory for the singular half-space problem -u'' = u^(-gamma).

The package constructs the explicit power solution and the one-parameter
family of linear-growth solutions, certifies two-sided bounds and gradient
decay along sampled profiles, and solves the two-dimensional finite
difference analogue between discrete barriers.
"""

from .certificates import (
    CERTIFICATE_KINDS,
    BoundCertificate,
    IntervalSubsolution,
    build_interval_subsolution,
    check_gradient,
    check_linear_growth,
    check_lower_power,
    check_upper_power,
    run_standard_checks,
)
from .errors import ConfigError, FormatError, NumericsError, SinglapError
from .halfplane import (
    BOUNDARY_MODES,
    BoundaryData,
    Field2D,
    Grid2D,
    IterationReport,
    SolveSpec2D,
    boundary_from_power,
    boundary_from_profile,
    build_grid,
    harnack_ratio,
    initial_bracket,
    load_field,
    oned_discrete_profile,
    save_field,
    save_field_json,
    solve,
    symmetry_deviation,
)
from .profiles import (
    BarrierSpec,
    GammaParam,
    Profile1D,
    ScalingMap,
    StripSpec,
    eval_barrier,
    eval_power,
    eval_supersolution,
    first_integral,
    gamma_param,
    load_profile,
    power_amplitude,
    rescale,
    save_profile,
    scaling_map,
)
from .shooting import (
    OdeState,
    ShootReport,
    ShootSpec,
    default_seed,
    expansion_residual,
    extend_to_zero,
    indicial_exponent,
    integrate,
    limit_slope,
    local_expansion,
    solve_prescribed_slope,
    standard_grid,
)

__version__ = "0.1.0"

__all__ = [
    "BOUNDARY_MODES",
    "BarrierSpec",
    "BoundCertificate",
    "BoundaryData",
    "CERTIFICATE_KINDS",
    "ConfigError",
    "Field2D",
    "FormatError",
    "GammaParam",
    "Grid2D",
    "IntervalSubsolution",
    "IterationReport",
    "NumericsError",
    "OdeState",
    "Profile1D",
    "ScalingMap",
    "ShootReport",
    "ShootSpec",
    "SinglapError",
    "SolveSpec2D",
    "StripSpec",
    "boundary_from_power",
    "boundary_from_profile",
    "build_grid",
    "build_interval_subsolution",
    "check_gradient",
    "check_linear_growth",
    "check_lower_power",
    "check_upper_power",
    "default_seed",
    "eval_barrier",
    "eval_power",
    "eval_supersolution",
    "expansion_residual",
    "extend_to_zero",
    "first_integral",
    "gamma_param",
    "harnack_ratio",
    "indicial_exponent",
    "initial_bracket",
    "integrate",
    "limit_slope",
    "load_field",
    "load_profile",
    "local_expansion",
    "oned_discrete_profile",
    "power_amplitude",
    "rescale",
    "run_standard_checks",
    "save_field",
    "save_field_json",
    "save_profile",
    "scaling_map",
    "solve",
    "solve_prescribed_slope",
    "standard_grid",
    "symmetry_deviation",
    "__version__",
]
