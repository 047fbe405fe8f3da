"""Downhill simplex optimizer with degeneracy correction and reevaluation."""

from ._rdsm import (
    ConfigError,
    CorrectionResult,
    DegeneracyReport,
    InvalidInput,
    IoError,
    ReplicationSummary,
    RunRecord,
    RunSummary,
    ScenarioCheck,
    ScenarioReport,
    correct_degeneracy,
    detect_degeneracy,
    format_real,
    format_report,
    linear_gradient,
    perimeter,
    reproduce,
    rosenbrock,
    run,
    run_replications,
    scenario_names,
    volume,
)

__all__ = [
    "ConfigError",
    "CorrectionResult",
    "DegeneracyReport",
    "InvalidInput",
    "IoError",
    "ReplicationSummary",
    "RunRecord",
    "RunSummary",
    "ScenarioCheck",
    "ScenarioReport",
    "correct_degeneracy",
    "detect_degeneracy",
    "format_real",
    "format_report",
    "linear_gradient",
    "perimeter",
    "reproduce",
    "rosenbrock",
    "run",
    "run_replications",
    "scenario_names",
    "volume",
]
