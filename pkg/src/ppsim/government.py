"""The central authority: allocation propensities, budget normalization, and
the four regime-specific allocation rules."""

from __future__ import annotations

import numpy as np

from .model import CountryConfig, PolicyRegime, SimState


def out_degrees(adjacency: np.ndarray) -> np.ndarray:
    """Count of outgoing spillover edges per issue (nonzeros in each row)."""
    return np.count_nonzero(np.asarray(adjacency), axis=1).astype(float)


def allocation_propensities(
    indicators: np.ndarray,
    monitoring: np.ndarray,
    f_r: float,
    degrees: np.ndarray,
    targets: np.ndarray,
) -> np.ndarray:
    """Per-issue allocation propensity.

    Laggard issues (large target gap) and central issues (high out-degree)
    are prioritized; issues caught in a scandal are budget-punished in
    proportion to the punishment capacity. Gaps are floored at zero so
    overshooting issues simply drop out of the allocation.
    """
    gap = np.maximum(0.0, np.asarray(targets, dtype=float) - np.asarray(indicators, dtype=float))
    return gap * (np.asarray(degrees, dtype=float) + 1.0) * (
        1.0 - np.asarray(monitoring, dtype=float) * f_r
    )


def allocate_budget(propensities: np.ndarray, budget: float) -> np.ndarray:
    """Distribute the budget proportionally to propensities.

    All-zero propensities (every target met, halt not yet flagged) fall back
    to a uniform split; the result always sums to the budget.
    """
    propensities = np.asarray(propensities, dtype=float)
    total = propensities.sum()
    if total == 0.0:
        return np.full(len(propensities), budget / len(propensities))
    return budget * propensities / total


def draw_arbitrary_profile(
    n: int, budget: float, rng: np.random.Generator
) -> np.ndarray:
    """A random allocation profile: uniform on the simplex, scaled to the
    budget. Used for uninformed prescriptions."""
    return rng.dirichlet(np.ones(n)) * budget


def next_allocation(
    regime: PolicyRegime,
    state: SimState,
    cfg: CountryConfig,
    f_r: float,
    monitoring: np.ndarray,
    degrees: np.ndarray | None = None,
) -> np.ndarray:
    """The allocation profile for the period ``state.t``.

    Strict regimes replay the pinned profile every period. Lax regimes use
    the pinned profile at t=0 and afterwards re-derive the allocation from
    the current propensities, consuming the most recent monitoring outcomes.
    """
    if regime.kind.strict or state.t == 0:
        return regime.pinned_profile
    if degrees is None:
        degrees = out_degrees(cfg.adjacency)
    q = allocation_propensities(
        state.indicators, monitoring, f_r, degrees, cfg.targets
    )
    return allocate_budget(q, cfg.budget)
