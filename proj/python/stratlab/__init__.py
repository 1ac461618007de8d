"""Verification tools for linearised stratified Couette flow."""

from ._core import (
    DegenerateModeError,
    ModeIndex,
    ParameterGateError,
    ParseError,
    PhysParams,
    ReportRow,
    ScenarioConfig,
    StreakState,
    ValidationError,
    baseline_liftup,
    emit_report,
    integral_p,
    integral_p_power_over_line,
    integrate_streak_numerically,
    liftup_baseline,
    parse_config,
    propagate_streak,
    rate_constants,
    run_sweep,
    standard_suite,
    symbol_p,
    symbol_p_prime,
    theorem1_applicable,
    verify_streaks,
)

__all__ = [
    "DegenerateModeError",
    "ModeIndex",
    "ParameterGateError",
    "ParseError",
    "PhysParams",
    "ReportRow",
    "ScenarioConfig",
    "StreakState",
    "ValidationError",
    "baseline_liftup",
    "emit_report",
    "integral_p",
    "integral_p_power_over_line",
    "integrate_streak_numerically",
    "liftup_baseline",
    "parse_config",
    "propagate_streak",
    "rate_constants",
    "run_sweep",
    "standard_suite",
    "symbol_p",
    "symbol_p_prime",
    "theorem1_applicable",
    "verify_streaks",
]
