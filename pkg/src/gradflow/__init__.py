"""Numerical laboratory for the critical gradient-absorption p-Laplacian flow.

Monotone finite-difference solvers in three exact rescaling frames, a
traveling-wave phase-plane engine, and asymptotics diagnostics checking the
free-boundary expansion law and the convergence to the stationary sandpile
profile.
"""

from .domain import (
    Frame,
    FrameTag,
    Grid,
    GridKind,
    InitialData,
    ModelParams,
    SolutionState,
    bump_profile,
    cell_weights,
    make_grid,
    sample_initial,
    sandpile_profile,
    support_radius_of,
    wave_profile,
)
from .solver import (
    EquationForm,
    EvolveStats,
    StepReport,
    evolve,
    gradient_magnitude_upwind,
    p_laplacian_radial,
    residual_field,
    stable_dt,
    step,
)
from .frames import (
    TimeMaps,
    omega_to_w,
    t_of_tau,
    tau_of_t,
    u_to_v,
    v_to_u,
    v_to_w,
    w_to_omega,
    w_to_v,
)
from .waves import (
    HumpProfile,
    Orbit,
    PlateauSubsolution,
    TWParams,
    build_hump,
    build_plateau_subsolution,
    c_monotonicity_check,
    cap_parameter_bounds,
    classify_critical_points,
    damped_front_values,
    direction_field_sign,
    explicit_wave,
    front_supersolution_values,
    integrate_interface_orbit,
    interface_seed_coefficient,
    sample_damped_front,
    sample_front_supersolution,
    sample_spreading_cap,
    spreading_cap_values,
    tw_rhs,
)
from .analysis import (
    ComparisonReport,
    FitReport,
    RateSeries,
    SeriesRecorder,
    check_comparison,
    check_scaled_bounds,
    fit_expansion_rate,
    fit_growup_exponent,
    norm_series,
    profile_error,
    state_norms,
    support_edges,
    support_radius,
    symmetry_inequality_check,
    wave_bracket_radius,
)
from . import errors

__version__ = "0.1.0"
