"""One-period dynamics: indicator propagation, monitoring draws, benefit
levels, and the functionaries' directed-learning contribution rule.

All functions are pure; randomness enters only through an injected
``numpy.random.Generator``.
"""

from __future__ import annotations

import math

import numpy as np

from .model import CountryConfig, SimState


def institutional_capacity(indicator_level: float) -> float:
    """Map an institutional indicator in [0, 1] to a capacity in [0, 1].

    ``level / exp(1 - level)``: monotone increasing, 0 at 0 and 1 at 1.
    Applied to the rule-of-law indicator it gives the punishment severity,
    to the control-of-corruption indicator the monitoring intensity.
    """
    level = float(indicator_level)
    return level / math.exp(1.0 - level)


def propagate_indicators(
    indicators_prev: np.ndarray, contributions: np.ndarray, cfg: CountryConfig
) -> np.ndarray:
    """Advance all indicators by one period.

    Each indicator moves toward its target by ``gamma * gap`` times the
    effective spending it receives, directly plus through incoming spillover
    edges; the result is clamped to [0, 1]. Inputs are untouched.
    """
    indicators_prev = np.asarray(indicators_prev, dtype=float)
    contributions = np.asarray(contributions, dtype=float)
    if indicators_prev.shape != (cfg.n,) or contributions.shape != (cfg.n,):
        raise ValueError("indicator/contribution vectors must have length n")
    spill = contributions @ cfg.adjacency
    x = indicators_prev + cfg.gamma * (cfg.targets - indicators_prev) * (
        contributions + spill
    )
    return np.clip(x, 0.0, 1.0)


def monitoring_probabilities(
    allocations: np.ndarray, contributions: np.ndarray, f_c: float
) -> np.ndarray:
    """Per-issue scandal probabilities: monitoring intensity times the
    issue's share of total diverted resources.

    With no diversion anywhere there is nothing to detect, so all
    probabilities are zero.
    """
    allocations = np.asarray(allocations, dtype=float)
    contributions = np.asarray(contributions, dtype=float)
    if allocations.shape != contributions.shape:
        raise ValueError("allocation/contribution vectors must match")
    diversion = allocations - contributions
    total = diversion.sum()
    if total == 0.0:
        return np.zeros_like(diversion)
    return f_c * diversion / total


def draw_monitoring(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Independent Bernoulli scandal outcomes as a 0.0/1.0 vector."""
    probs = np.asarray(probs, dtype=float)
    return (rng.random(len(probs)) < probs).astype(float)


def compute_benefits(
    indicators: np.ndarray,
    allocations: np.ndarray,
    contributions: np.ndarray,
    monitoring: np.ndarray,
    f_r: float,
) -> np.ndarray:
    """Functionaries' period benefits: development status plus the diverted
    amount, scaled down by punishment when a scandal broke."""
    diversion = np.asarray(allocations, dtype=float) - np.asarray(
        contributions, dtype=float
    )
    return (np.asarray(indicators, dtype=float) + diversion) * (
        1.0 - np.asarray(monitoring, dtype=float) * f_r
    )


def update_contributions(state: SimState, allocations_new: np.ndarray) -> np.ndarray:
    """Directed-learning step for all functionaries.

    If the last change in benefits co-moved with the last change in
    contributions, keep moving the contribution the same way, with a step of
    ``|benefit change|`` times the mean of the two lagged contributions; a
    zero product freezes the contribution for the period. The result is
    clamped to [0, allocation].
    """
    d_f = state.benefits - state.benefits_lag1
    d_c = state.contributions - state.contributions_lag1
    direction = np.sign(d_f * d_c)
    raw = state.contributions + direction * np.abs(d_f) * (
        state.contributions + state.contributions_lag1
    ) / 2.0
    return np.minimum(np.asarray(allocations_new, dtype=float), np.maximum(0.0, raw))


def bootstrap_contributions(
    allocations: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Initial contributions while no learning lags exist: uniform in
    [0, allocation], independently per issue."""
    allocations = np.asarray(allocations, dtype=float)
    return rng.random(len(allocations)) * allocations
