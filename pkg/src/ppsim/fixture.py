"""Bundled synthetic dataset: 12 countries in 4 development groups, 20
indicators over 11 years, generated by a seeded, documented process.

Per country, each indicator's true level follows a noisy line from an
initial level to a target, both set by the country's development group;
pillar-block factors and a country-wide factor induce the correlation
structure the network estimation step feeds on. True levels are mapped to
raw units through per-indicator affine transforms (reversed for the three
negative-polarity indicators), so the ingestion pipeline has real work to
do. Budgets are expenditure-share-like scalars per country.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .analysis import PillarMap
from .data import (
    PanelTable,
    assemble_country_panels,
    build_config,
    file_sha256,
    provenance_comment,
    write_csv,
    write_json,
)
from .model import BENCHMARK_KIND
from .network import estimate_network
from .simulation import run_ensemble

FIXTURE_SEED = 20260809

# label, pillar, polarity (-1: lower raw value is better)
INDICATORS = [
    ("rule_of_law", "institutions", 1),
    ("control_of_corruption", "institutions", 1),
    ("judicial_independence", "institutions", 1),
    ("primary_completion", "education", 1),
    ("secondary_enrollment", "education", 1),
    ("adult_literacy", "education", 1),
    ("life_expectancy", "health", 1),
    ("immunization_coverage", "health", 1),
    ("child_mortality", "health", -1),
    ("road_quality", "infrastructure", 1),
    ("electricity_access", "infrastructure", 1),
    ("internet_penetration", "infrastructure", 1),
    ("inflation", "macroeconomic_environment", -1),
    ("public_debt", "macroeconomic_environment", -1),
    ("fdi_inflows", "macroeconomic_environment", 1),
    ("employment_rate", "labor_market", 1),
    ("female_participation", "labor_market", 1),
    ("technological_readiness", "technology", 1),
    ("rnd_intensity", "technology", 1),
    ("mobile_subscriptions", "technology", 1),
]

N_INDICATORS = len(INDICATORS)
N_COUNTRIES = 12
N_YEARS = 11
FIRST_YEAR = 2006

# development-group knobs: general indicator base level, institutional
# indicator base level, budget (expenditure share), and decade progress as a
# share of the remaining headroom (developed countries move less)
GROUP_BASE = (0.68, 0.50, 0.34, 0.20)
GROUP_INSTITUTIONS = (0.55, 0.42, 0.30, 0.18)
GROUP_BUDGET = (0.30, 0.27, 0.22, 0.17)
GROUP_PROGRESS = ((0.05, 0.10), (0.08, 0.15), (0.14, 0.24), (0.18, 0.30))
INSTITUTION_PROGRESS = (0.04, 0.09)  # institutions move slowly everywhere

# per-country draw salts: each country's panel comes from its own child
# stream (FIXTURE_SEED, country index, salt), so single countries can be
# re-drawn without disturbing the rest of the dataset
COUNTRY_SALTS = (0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0)

# simulation knobs shared by every fixture country (tuned so that benchmark
# runs converge within a few hundred periods and the regimes separate)
GAMMA = 30.0
MAX_PERIODS = 900
TOLERANCE = 0.005
N_RUNS = 1000
DISCOVERY_RUNS = 100

COUNTRY_NOISE = 0.05
INDICATOR_NOISE = 0.06
FACTOR_SD = 0.008
BLOCK_SD = 0.012
OBS_SD = 0.02


def country_name(idx: int) -> str:
    return f"C{idx:02d}"


def group_of(idx: int) -> int:
    return idx // 3


def _country_trajectory(seed: int, c: int) -> np.ndarray:
    """One country's (years x indicators) true levels, from its own stream."""
    rng = np.random.default_rng((seed, c, COUNTRY_SALTS[c]))
    pillars = [p for _, p, _ in INDICATORS]
    g = group_of(c)
    base = GROUP_BASE[g] + rng.uniform(-COUNTRY_NOISE, COUNTRY_NOISE)
    start = np.clip(
        base + rng.uniform(-INDICATOR_NOISE, INDICATOR_NOISE, N_INDICATORS),
        0.04,
        0.90,
    )
    inst = GROUP_INSTITUTIONS[g]
    start[:3] = np.clip(inst + rng.uniform(-0.04, 0.04, 3), 0.04, 0.9)
    progress = rng.uniform(*GROUP_PROGRESS[g], N_INDICATORS)
    progress[:3] = rng.uniform(*INSTITUTION_PROGRESS, 3)
    target = np.clip(start + progress * (0.95 - start), 0.05, 0.97)

    factor = np.cumsum(rng.normal(0.0, FACTOR_SD, N_YEARS))
    block_path = {p: np.cumsum(rng.normal(0.0, BLOCK_SD, N_YEARS)) for p in set(pillars)}
    tt = np.linspace(0.0, 1.0, N_YEARS)
    values = np.empty((N_YEARS, N_INDICATORS))
    for k in range(N_INDICATORS):
        line = start[k] + (target[k] - start[k]) * tt
        wiggle = factor + block_path[pillars[k]] + rng.normal(0.0, OBS_SD, N_YEARS)
        # bridge the wiggle to zero at both ends so the first/last rows
        # (the simulation's initial levels and targets) equal the design
        wiggle = wiggle - (1.0 - tt) * wiggle[0] - tt * wiggle[-1]
        values[:, k] = np.clip(line + wiggle, 0.02, 0.98)
    return values


def _true_trajectories(seed: int):
    """Per-country (years x indicators) true levels."""
    labels = [lab for lab, _, _ in INDICATORS]
    out = {
        country_name(c): _country_trajectory(seed, c) for c in range(N_COUNTRIES)
    }
    return labels, out


def _raw_transforms(rng: np.random.Generator):
    """Per-indicator affine maps from true levels to raw units."""
    scale = rng.uniform(8.0, 120.0, N_INDICATORS)
    offset = rng.uniform(-15.0, 40.0, N_INDICATORS)
    return scale, offset


def generate_fixture(out_dir, seed: int = FIXTURE_SEED, with_calibration: bool = True) -> dict:
    """Write the full fixture dataset into ``out_dir``.

    Emits panel.csv, metadata.csv, pillars.csv, features.csv, manifest.json
    and (optionally) manifest_calibrate.json whose empirical scores come from
    simulating each country at the fixture's own effectiveness value.
    Deterministic in ``seed``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng((seed, N_COUNTRIES))  # shared raw-unit stream
    labels, trajectories = _true_trajectories(seed)
    scale, offset = _raw_transforms(rng)

    prov = provenance_comment(seed, "fixture-generator")
    rows = []
    for c in range(N_COUNTRIES):
        name = country_name(c)
        values = trajectories[name]
        for y in range(N_YEARS):
            raw = []
            for k, (_, _, pol) in enumerate(INDICATORS):
                level = values[y, k] if pol > 0 else 1.0 - values[y, k]
                raw.append(offset[k] + scale[k] * level)
            rows.append([name, FIRST_YEAR + y] + raw)
    write_csv(out / "panel.csv", ["country", "year"] + labels, rows, prov)

    write_csv(
        out / "metadata.csv",
        ["indicator", "polarity"],
        [(lab, pol) for lab, _, pol in INDICATORS],
        prov,
    )
    write_csv(
        out / "pillars.csv",
        ["indicator", "pillar"],
        [(lab, pil) for lab, pil, _ in INDICATORS],
        prov,
    )

    budgets = {
        country_name(c): round(
            GROUP_BUDGET[group_of(c)] + float(rng.uniform(-0.015, 0.015)), 4
        )
        for c in range(N_COUNTRIES)
    }
    manifest = {
        "panel": "panel.csv",
        "metadata": "metadata.csv",
        "pillars": "pillars.csv",
        "regimes": [
            "lax_uninformed",
            "strict_uninformed",
            "lax_informed",
            "strict_informed",
        ],
        "n_runs": N_RUNS,
        "discovery_runs": DISCOVERY_RUNS,
        "master_seed": seed,
        "gamma": GAMMA,
        "budget": budgets,
        "rule_of_law": "rule_of_law",
        "control_of_corruption": "control_of_corruption",
        "max_periods": MAX_PERIODS,
        "tolerance": TOLERANCE,
    }
    write_json(out / "manifest.json", manifest)

    # per-country mean normalized indicator levels, for clustering
    from .data import load_polarity, read_panel_csv  # local to avoid cycle at import

    table = read_panel_csv(out / "panel.csv")
    polarity = load_polarity(out / "metadata.csv", table.labels)
    panels = assemble_country_panels(table, polarity)
    feature_rows = [
        [name] + list(panels[name].values.mean(axis=0)) for name in table.countries
    ]
    write_csv(out / "features.csv", ["country"] + labels, feature_rows, prov)

    if with_calibration:
        _write_calibration_manifest(out, manifest, panels, budgets, seed)
    return {"manifest": out / "manifest.json", "countries": table.countries}


def _write_calibration_manifest(out, manifest, panels, budgets, seed) -> None:
    """Empirical corruption scores from the model itself at the fixture's
    effectiveness value, plus a recovery grid around it."""
    from .data import RunManifest  # constructed in memory, not via from_path

    empirical = {}
    for name, panel in panels.items():
        network = estimate_network(panel)
        m = RunManifest(
            panel=out / "panel.csv",
            metadata=out / "metadata.csv",
            pillars=out / "pillars.csv",
            regimes=[BENCHMARK_KIND],
            n_runs=1,
            discovery_runs=1,
            master_seed=seed,
            budget=budgets,
            rule_of_law="rule_of_law",
            control_of_corruption="control_of_corruption",
            max_periods=MAX_PERIODS,
            tolerance=TOLERANCE,
            gamma=GAMMA,
            sha256="",
            base_dir=out,
        )
        cfg = build_config(m, panel, network, name)
        results = run_ensemble(cfg, BENCHMARK_KIND, 40, master_seed=seed + 1)
        empirical[name] = round(
            float(np.mean([r.corruption / max(r.periods, 1) for r in results])), 6
        )

    calibrate = dict(manifest)
    del calibrate["gamma"]
    calibrate["calibration_grid"] = [
        round(g, 1) for g in np.linspace(10.0, 80.0, 8)
    ]
    calibrate["runs_per_grid_point"] = 30
    calibrate["empirical_corruption"] = empirical
    write_json(out / "manifest_calibrate.json", calibrate)
