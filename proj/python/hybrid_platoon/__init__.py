"""Hybrid CTG/CS vehicle platoon simulation and string-stability analysis."""

from ._core import (
    ConfigError,
    CsParams,
    CtgParams,
    LeaderKind,
    MeasurementError,
    NumericError,
    PlatoonConfig,
    PlatoonError,
    PlatoonKind,
    Scenario,
    SimulationTrace,
    VehicleParams,
    dampening_ratio,
    exogenous_profile,
    feasibility_scan,
    max_jerk,
    normalize_config,
    run,
    run_multi,
    stability_report,
    summarize,
    tet,
    tit,
    validate_stability_json,
)

__all__ = [
    "ConfigError",
    "CsParams",
    "CtgParams",
    "LeaderKind",
    "MeasurementError",
    "NumericError",
    "PlatoonConfig",
    "PlatoonError",
    "PlatoonKind",
    "Scenario",
    "SimulationTrace",
    "VehicleParams",
    "dampening_ratio",
    "exogenous_profile",
    "feasibility_scan",
    "max_jerk",
    "normalize_config",
    "run",
    "run_multi",
    "stability_report",
    "summarize",
    "tet",
    "tit",
    "validate_stability_json",
]
