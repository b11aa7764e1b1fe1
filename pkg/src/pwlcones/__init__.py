"""Invariant cones and periodic orbits of three-dimensional two-zone
continuous piecewise-linear systems.

The library represents systems in a per-zone companion shape, evaluates the
closed-form half-plane passage maps, decides existence of two-zonal invariant
cones and of the periodic orbits they may carry, synthesizes systems that
carry them by construction, and validates everything against exact orbit
tracing plus an independent fixed-step integrator.
"""

from .auxiliary import PhiRoot, g_ratio, log_g, phi, phi_deriv, phi_scaled, tau_hat
from .cones import (
    ConeDynamics,
    ConeFamily,
    ConeFindings,
    ConeKind,
    ConeSolution,
    ExistenceReport,
    OneZoneCone,
    ScreenResult,
    analyze_system,
    classify_dynamics,
    cone_continuum,
    matching_residuals,
    necessary_screen,
    one_zone_cone_check,
    return_log_ratio,
    slope_map_multiplier,
    solve_invariant_cones,
)
from .errors import (
    AngleRegionViolation,
    Diverged,
    DomainError,
    MalformedInput,
    NonPositiveBeta,
    NoReturnFound,
    NotApplicable,
    NotContinuous,
    NotFocusType,
    NotObservable,
    OriginReached,
    PwlError,
    SingularModalMatrix,
    WrongHalfPlane,
)
from .halfmaps import (
    HalfMapResult,
    ZoneSide,
    entry_slope,
    exit_slope,
    half_map,
    invert_entry_slope,
    modal_matrix,
    radial_ratio,
    slope_ratios,
    slope_transition,
    zone_flow,
)
from .model import (
    CanonicalCoeffs,
    EigenTriple,
    FocusPlane,
    PwlSystem,
    ZoneSpec,
    canonicalize,
    coeffs_from_eigen,
    companion_matrix,
    eigen_from_coeffs,
    focus_plane,
    invariant_line,
    load_system,
    system_from_json,
    system_to_json,
)
from .simulate import (
    CrossDir,
    Crossing,
    OrbitTrace,
    closure_check,
    rk4_flow,
    trace_orbit,
    trace_summary,
    write_trace_csv,
)
from .synthesis import (
    SynthesisInput,
    SynthesisOutput,
    example_system,
    nabla_log,
    sample_admissible_angles,
    synthesis_determinant,
    synthesize,
    synthesize_balanced,
)

__version__ = "0.1.0"

__all__ = [
    "AngleRegionViolation",
    "CanonicalCoeffs",
    "ConeDynamics",
    "ConeFamily",
    "ConeFindings",
    "ConeKind",
    "ConeSolution",
    "CrossDir",
    "Crossing",
    "Diverged",
    "DomainError",
    "EigenTriple",
    "ExistenceReport",
    "FocusPlane",
    "HalfMapResult",
    "MalformedInput",
    "NonPositiveBeta",
    "NoReturnFound",
    "NotApplicable",
    "NotContinuous",
    "NotFocusType",
    "NotObservable",
    "OneZoneCone",
    "OrbitTrace",
    "OriginReached",
    "PhiRoot",
    "PwlError",
    "PwlSystem",
    "ScreenResult",
    "SingularModalMatrix",
    "SynthesisInput",
    "SynthesisOutput",
    "WrongHalfPlane",
    "ZoneSide",
    "ZoneSpec",
    "analyze_system",
    "canonicalize",
    "classify_dynamics",
    "closure_check",
    "coeffs_from_eigen",
    "companion_matrix",
    "cone_continuum",
    "eigen_from_coeffs",
    "entry_slope",
    "example_system",
    "exit_slope",
    "focus_plane",
    "g_ratio",
    "half_map",
    "invariant_line",
    "invert_entry_slope",
    "load_system",
    "log_g",
    "matching_residuals",
    "modal_matrix",
    "nabla_log",
    "necessary_screen",
    "one_zone_cone_check",
    "phi",
    "phi_deriv",
    "phi_scaled",
    "radial_ratio",
    "return_log_ratio",
    "rk4_flow",
    "sample_admissible_angles",
    "slope_map_multiplier",
    "slope_ratios",
    "slope_transition",
    "solve_invariant_cones",
    "synthesis_determinant",
    "synthesize",
    "synthesize_balanced",
    "system_from_json",
    "system_to_json",
    "tau_hat",
    "trace_orbit",
    "trace_summary",
    "write_trace_csv",
    "zone_flow",
]
