"""Domain types for the policy-prioritization game.

Everything here is a value type: construction validates invariants and the
stored arrays are frozen. The one exception is :class:`SimState`, which is
owned and mutated by a single simulation run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional

import numpy as np


class ConfigError(ValueError):
    """Raised when a domain type is constructed from invalid data."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(violations))


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of checking a config against its invariants."""

    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:  # truthy iff valid
        return self.ok


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.flags.writeable = False
    return arr


class RegimeKind(str, Enum):
    """The four policy regimes: {strict, lax} x {informed, uninformed}."""

    LAX_UNINFORMED = "lax_uninformed"
    STRICT_UNINFORMED = "strict_uninformed"
    LAX_INFORMED = "lax_informed"
    STRICT_INFORMED = "strict_informed"

    @property
    def strict(self) -> bool:
        return self in (RegimeKind.STRICT_UNINFORMED, RegimeKind.STRICT_INFORMED)

    @property
    def informed(self) -> bool:
        return self in (RegimeKind.LAX_INFORMED, RegimeKind.STRICT_INFORMED)


BENCHMARK_KIND = RegimeKind.LAX_UNINFORMED

ALL_REGIME_KINDS = (
    RegimeKind.LAX_UNINFORMED,
    RegimeKind.STRICT_UNINFORMED,
    RegimeKind.LAX_INFORMED,
    RegimeKind.STRICT_INFORMED,
)


@dataclass(frozen=True)
class CountryConfig:
    """Immutable description of one country's policy-issue system.

    ``adjacency[j, i]`` is the spillover weight of issue ``j`` on issue ``i``,
    so effective spending on ``j`` also advances indicator ``i``.
    """

    initial_indicators: np.ndarray  # levels in [0, 1], length n
    targets: np.ndarray  # target levels in [0, 1], length n
    adjacency: np.ndarray  # n x n spillover weights, zero diagonal
    budget: float  # per-period non-committed resources, > 0
    gamma: float  # policy-implementation effectiveness, > 0
    rule_of_law_idx: int  # issue whose indicator sets punishment capacity
    control_of_corruption_idx: int  # issue whose indicator sets monitoring capacity
    max_periods: int = 10_000
    name: str = ""

    def __post_init__(self):
        report = validate_config(self)
        if not report.ok:
            raise ConfigError(list(report.violations))
        object.__setattr__(self, "initial_indicators", _frozen(self.initial_indicators))
        object.__setattr__(self, "targets", _frozen(self.targets))
        object.__setattr__(self, "adjacency", _frozen(self.adjacency))
        object.__setattr__(self, "budget", float(self.budget))
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def n(self) -> int:
        return len(self.initial_indicators)

    @property
    def pre_converged(self) -> np.ndarray:
        """Issues whose target is already met at t=0; they never block the halt rule."""
        return np.asarray(self.targets) <= np.asarray(self.initial_indicators)

    @property
    def out_degrees(self) -> np.ndarray:
        """Per-issue count of outgoing spillover edges (nonzeros in each row)."""
        return np.count_nonzero(np.asarray(self.adjacency), axis=1).astype(float)


def validate_config(cfg: "CountryConfig | Mapping") -> ValidationReport:
    """Check every CountryConfig invariant; the report is empty iff valid.

    Accepts either a constructed config or a plain mapping of its fields, so
    invalid drafts can be inspected without tripping the constructor.
    """
    if isinstance(cfg, CountryConfig):
        get = lambda k, d=None: getattr(cfg, k, d)
    else:
        get = lambda k, d=None: cfg.get(k, d)

    violations: list[str] = []
    initial = np.asarray(get("initial_indicators"), dtype=float)
    targets = np.asarray(get("targets"), dtype=float)
    adjacency = np.asarray(get("adjacency"), dtype=float)
    n = initial.shape[0] if initial.ndim == 1 else -1

    if initial.ndim != 1:
        violations.append("initial_indicators must be a 1-d vector")
    if n >= 0 and n < 2:
        violations.append("n: at least 2 policy issues required")
    if targets.shape != initial.shape:
        violations.append("targets length must match initial_indicators")
    if not np.all(np.isfinite(initial)) or (initial.size and (initial.min() < 0 or initial.max() > 1)):
        violations.append("range: initial_indicators must lie in [0, 1]")
    if not np.all(np.isfinite(targets)) or (targets.size and (targets.min() < 0 or targets.max() > 1)):
        violations.append("range: targets must lie in [0, 1]")
    if adjacency.ndim != 2 or adjacency.shape != (n, n):
        violations.append("adjacency must be an n x n matrix")
    else:
        if not np.all(np.isfinite(adjacency)):
            violations.append("adjacency entries must be finite")
        elif np.any(np.diagonal(adjacency) != 0.0):
            violations.append("diagonal: adjacency must have a zero diagonal")

    budget = get("budget")
    if budget is None or not np.isfinite(budget) or budget <= 0:
        violations.append("budget must be a positive real")
    gamma = get("gamma")
    if gamma is None or not np.isfinite(gamma) or gamma <= 0:
        violations.append("gamma must be a positive real")

    for label in ("rule_of_law_idx", "control_of_corruption_idx"):
        idx = get(label)
        if idx is None or not (0 <= int(idx) < max(n, 0)):
            violations.append(f"{label} out of range")

    max_periods = get("max_periods", 1)
    if max_periods is None or int(max_periods) < 1:
        violations.append("max_periods must be a positive integer")

    return ValidationReport(tuple(violations))


@dataclass(frozen=True)
class PolicyRegime:
    """A regime kind plus the profile it pins.

    Strict kinds replay ``pinned_profile`` every period; lax kinds use it only
    at t=0 and adapt afterwards. Informed kinds pin a discovered profile,
    uninformed kinds an arbitrary one.
    """

    kind: RegimeKind
    pinned_profile: np.ndarray  # non-negative, sums to the country's budget

    def __post_init__(self):
        profile = np.asarray(self.pinned_profile, dtype=float)
        if profile.ndim != 1 or profile.size == 0:
            raise ConfigError(["pinned_profile must be a non-empty vector"])
        if not np.all(np.isfinite(profile)) or profile.min() < 0:
            raise ConfigError(["pinned_profile entries must be finite and >= 0"])
        object.__setattr__(self, "kind", RegimeKind(self.kind))
        object.__setattr__(self, "pinned_profile", _frozen(profile))

    def check_budget(self, budget: float) -> None:
        total = float(self.pinned_profile.sum())
        if abs(total - budget) > 1e-9 * budget:
            raise ConfigError(
                [f"pinned_profile sums to {total!r}, expected budget {budget!r}"]
            )


@dataclass
class SimState:
    """Mutable per-run state; owned by exactly one simulation run.

    Contributions and benefits carry two lags because the directed-learning
    step compares the two most recent realized periods.
    """

    t: int
    allocations: np.ndarray
    contributions: np.ndarray
    contributions_lag1: np.ndarray
    contributions_lag2: np.ndarray
    benefits: np.ndarray
    benefits_lag1: np.ndarray
    benefits_lag2: np.ndarray
    indicators: np.ndarray
    monitoring: np.ndarray  # last drawn scandal outcomes, 0.0/1.0

    @classmethod
    def fresh(cls, initial_indicators: np.ndarray) -> "SimState":
        n = len(initial_indicators)
        z = lambda: np.zeros(n)
        return cls(
            t=-1,
            allocations=z(),
            contributions=z(),
            contributions_lag1=z(),
            contributions_lag2=z(),
            benefits=z(),
            benefits_lag1=z(),
            benefits_lag2=z(),
            indicators=np.array(initial_indicators, dtype=float),
            monitoring=z(),
        )


@dataclass(frozen=True)
class Trajectories:
    """Per-period records of one run, each array shaped (periods, n)."""

    allocations: np.ndarray
    contributions: np.ndarray
    indicators: np.ndarray
    monitoring: np.ndarray


@dataclass(frozen=True)
class RunResult:
    """Outcome of one simulation run."""

    corruption: float  # budget-normalized total diversion over the run
    periods: int  # periods executed until convergence or cap
    converged: bool
    per_issue_diversion: np.ndarray  # sum_t (P - C) / budget, per issue
    mean_allocation: np.ndarray  # time-averaged allocation profile
    trajectories: Optional[Trajectories] = None


@dataclass(frozen=True)
class RegimeSummary:
    """Distribution summary of the corruption metric for one regime."""

    samples: np.ndarray
    mean: float
    p25: float
    p50: float
    converged_fraction: float
    mean_periods: float
    mean_per_issue_diversion: np.ndarray


@dataclass(frozen=True)
class Comparison:
    """Alternative regime vs. the benchmark: efficiency gain and Welch test."""

    efficiency_gain: float  # benchmark mean corruption minus alternative mean
    welch_t: float
    welch_p: float


@dataclass(frozen=True)
class EnsembleStats:
    """Per-regime corruption distributions plus benchmark comparisons."""

    regimes: dict[RegimeKind, RegimeSummary]
    comparisons: dict[RegimeKind, Comparison] = field(default_factory=dict)
