"""Policy-prioritization simulator and policy-regime evaluation harness."""

from .model import (
    ALL_REGIME_KINDS,
    BENCHMARK_KIND,
    Comparison,
    ConfigError,
    CountryConfig,
    EnsembleStats,
    PolicyRegime,
    RegimeKind,
    RegimeSummary,
    RunResult,
    SimState,
    Trajectories,
    ValidationReport,
    validate_config,
)
from .simulation import child_seed, run, run_ensemble, sweep, thread_count

__all__ = [
    "ALL_REGIME_KINDS",
    "BENCHMARK_KIND",
    "Comparison",
    "ConfigError",
    "CountryConfig",
    "EnsembleStats",
    "PolicyRegime",
    "RegimeKind",
    "RegimeSummary",
    "RunResult",
    "SimState",
    "Trajectories",
    "ValidationReport",
    "validate_config",
    "child_seed",
    "run",
    "run_ensemble",
    "sweep",
    "thread_count",
]

__version__ = "0.1.0"
