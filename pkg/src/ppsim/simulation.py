"""The run loop: wires the government and the functionaries into full
simulations, with convergence detection, the corruption metric, and a
deterministic parallel batch runner.

Randomness protocol per run: ``default_rng(seed)``; each period consumes one
uniform block for the contribution bootstrap while t < 2, then one uniform
block for the scandal draws. Batch runs use independent child streams mixed
from ``(master_seed, run_index, purpose)`` via ``numpy.random.SeedSequence``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .government import draw_arbitrary_profile
from .model import (
    CountryConfig,
    PolicyRegime,
    RegimeKind,
    RunResult,
    Trajectories,
)

DEFAULT_TOLERANCE = 1e-4

THREADS_ENV_VAR = "PPSIM_THREADS"


def thread_count(explicit: int | None = None) -> int:
    """Worker parallelism: explicit argument, else PPSIM_THREADS, else all cores."""
    if explicit is not None:
        return max(1, int(explicit))
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def child_seed(master_seed: int, *key: int) -> int:
    """Mix a master seed and an integer key path into an independent seed."""
    ss = np.random.SeedSequence((int(master_seed),) + tuple(int(k) for k in key))
    return int.from_bytes(ss.generate_state(4, np.uint32).tobytes(), "little")


def run(
    cfg: CountryConfig,
    regime: PolicyRegime,
    seed: int,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    record_trajectories: bool = False,
) -> RunResult:
    """Execute one simulation until every indicator meets its target (within
    ``tolerance``) or the period cap is hit.

    Per period: punishment and monitoring capacities are read off the current
    institutional indicators; the government allocates; functionaries
    contribute (uniform bootstrap for the first two periods, directed
    learning afterwards); scandals are drawn; indicators propagate; benefits
    are computed from the updated indicators. The corruption metric is the
    budget-normalized total diversion over all executed periods. Fully
    deterministic in (cfg, regime, seed).
    """
    if regime.pinned_profile.shape != (cfg.n,):
        raise ValueError("pinned profile length must match the config")
    regime.check_budget(cfg.budget)

    rng = np.random.default_rng(seed)
    n = cfg.n
    # hot-loop locals; the arithmetic below mirrors the public operations in
    # dynamics/government expression for expression
    targets = cfg.targets
    adjacency = cfg.adjacency
    gamma = cfg.gamma
    budget = cfg.budget
    rol = cfg.rule_of_law_idx
    coc = cfg.control_of_corruption_idx
    degrees_plus_1 = cfg.out_degrees + 1.0
    pinned = regime.pinned_profile
    strict = regime.kind.strict
    uniform_split = np.full(n, budget / n)
    exp = math.exp
    # pre-converged issues never block the halt rule
    target_floor = np.where(cfg.pre_converged, -np.inf, cfg.targets - tolerance)

    indicators = np.array(cfg.initial_indicators)
    theta = np.zeros(n)
    c_prev = np.zeros(n)
    c_prev2 = np.zeros(n)
    f_prev = np.zeros(n)
    f_prev2 = np.zeros(n)
    diversion_total = np.zeros(n)
    allocation_total = np.zeros(n)
    traj_p: list[np.ndarray] = []
    traj_c: list[np.ndarray] = []
    traj_i: list[np.ndarray] = []
    traj_theta: list[np.ndarray] = []

    converged = bool((indicators >= target_floor).all())
    periods = 0
    for t in range(cfg.max_periods):
        if converged:
            break
        level = indicators[rol]
        f_r = level / exp(1.0 - level)
        level = indicators[coc]
        f_c = level / exp(1.0 - level)

        if strict or t == 0:
            allocations = pinned
        else:
            q = np.maximum(0.0, targets - indicators) * degrees_plus_1 * (
                1.0 - theta * f_r
            )
            q_total = q.sum()
            if q_total == 0.0:
                allocations = uniform_split
            else:
                allocations = budget * q / q_total

        if t < 2:
            contributions = rng.random(n) * allocations
        else:
            d_f = f_prev - f_prev2
            raw = c_prev + np.sign(d_f * (c_prev - c_prev2)) * np.abs(d_f) * (
                c_prev + c_prev2
            ) / 2.0
            contributions = np.minimum(allocations, np.maximum(0.0, raw))

        diversion = allocations - contributions
        d_total = diversion.sum()
        if d_total == 0.0:
            probs = np.zeros(n)
        else:
            probs = f_c * diversion / d_total
        theta = (rng.random(n) < probs).astype(float)

        spill = contributions @ adjacency
        indicators = np.clip(
            indicators + gamma * (targets - indicators) * (contributions + spill),
            0.0,
            1.0,
        )
        # benefits read the period's updated indicator: the status reward for
        # contributing must land in the same benefit change the directed
        # learner pairs with the contribution change, otherwise diverting
        # always wins and the system degenerates
        benefits = (indicators + diversion) * (1.0 - theta * f_r)

        diversion_total += diversion
        allocation_total += allocations
        if record_trajectories:
            traj_p.append(np.array(allocations))
            traj_c.append(contributions)
            traj_i.append(indicators)
            traj_theta.append(theta)

        c_prev2 = c_prev
        c_prev = contributions
        f_prev2 = f_prev
        f_prev = benefits

        periods = t + 1
        converged = bool((indicators >= target_floor).all())

    if periods:
        mean_allocation = allocation_total / periods
    else:
        mean_allocation = np.array(regime.pinned_profile)

    trajectories = None
    if record_trajectories:
        stack = lambda rows: np.array(rows).reshape(periods, n)
        trajectories = Trajectories(
            allocations=stack(traj_p),
            contributions=stack(traj_c),
            indicators=stack(traj_i),
            monitoring=stack(traj_theta),
        )
    return RunResult(
        corruption=float(diversion_total.sum()) / cfg.budget,
        periods=periods,
        converged=converged,
        per_issue_diversion=diversion_total / cfg.budget,
        mean_allocation=mean_allocation,
        trajectories=trajectories,
    )


def _run_fixed(args) -> RunResult:
    cfg, regime, seed, tolerance = args
    return run(cfg, regime, seed, tolerance=tolerance)


def _run_kind(args) -> RunResult:
    cfg, kind, profile, seed, tolerance, record = args
    return run(
        cfg,
        PolicyRegime(kind, profile),
        seed,
        tolerance=tolerance,
        record_trajectories=record,
    )


def _map_tasks(fn, tasks, threads: int) -> list:
    if threads <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    chunksize = max(1, len(tasks) // (threads * 8))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks, chunksize=chunksize))


def sweep(
    cfg: CountryConfig,
    regime: PolicyRegime,
    seeds: list[int],
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    threads: int | None = None,
) -> list[RunResult]:
    """Independent runs of one regime, one per seed, in seed order.

    Results are identical whatever the worker count; each run only sees its
    own stream.
    """
    tasks = [(cfg, regime, int(seed), tolerance) for seed in seeds]
    return _map_tasks(_run_fixed, tasks, thread_count(threads))


def profile_for_run(
    kind: RegimeKind,
    cfg: CountryConfig,
    master_seed: int,
    run_index: int,
    discovered: np.ndarray | None = None,
) -> np.ndarray:
    """The profile a regime pins for one batch run.

    Informed kinds pin the discovered profile (shared by every run);
    uninformed kinds draw a fresh arbitrary profile from the run's own
    profile stream, so the batch explores the whole space of priorities.
    """
    if kind.informed:
        if discovered is None:
            raise ValueError("informed regimes need a discovered profile")
        return np.asarray(discovered, dtype=float)
    rng = np.random.default_rng(child_seed(master_seed, run_index, 1))
    return draw_arbitrary_profile(cfg.n, cfg.budget, rng)


def run_ensemble(
    cfg: CountryConfig,
    kind: RegimeKind,
    n_runs: int,
    master_seed: int,
    *,
    discovered: np.ndarray | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    threads: int | None = None,
    record_trajectories: bool = False,
) -> list[RunResult]:
    """A Monte Carlo batch of one regime kind.

    Run ``r`` executes with seed ``child_seed(master_seed, r, 0)``; regime
    kinds evaluated with the same master seed therefore share their run
    streams pairwise, which makes same-kind comparisons exactly degenerate.
    """
    tasks = [
        (
            cfg,
            kind,
            profile_for_run(kind, cfg, master_seed, r, discovered),
            child_seed(master_seed, r, 0),
            tolerance,
            record_trajectories,
        )
        for r in range(n_runs)
    ]
    return _map_tasks(_run_kind, tasks, thread_count(threads))
