import json
from pathlib import Path

import numpy as np
import pytest

from ppsim import CountryConfig


def toy_config(n=4, seed=0, budget=1.0, gamma=2.0, max_periods=200, spread=0.4):
    """Small random config with positive gaps and a sparse spillover matrix."""
    rng = np.random.default_rng(seed)
    initial = rng.uniform(0.1, 0.5, n)
    targets = np.clip(initial + rng.uniform(0.1, 0.5, n) * spread / 0.4, 0, 1)
    adjacency = rng.uniform(0.2, 0.9, (n, n)) * (rng.random((n, n)) < 0.5)
    np.fill_diagonal(adjacency, 0.0)
    return CountryConfig(
        initial_indicators=initial,
        targets=targets,
        adjacency=adjacency,
        budget=budget,
        gamma=gamma,
        rule_of_law_idx=0,
        control_of_corruption_idx=1 % n,
        max_periods=max_periods,
    )


@pytest.fixture
def cfg4():
    return toy_config()


def write_mini_dataset(
    root: Path,
    n_countries=2,
    n_indicators=6,
    n_years=6,
    n_runs=20,
    seed=11,
    gamma=20.0,
    max_periods=150,
    tolerance=0.01,
    calibration=False,
):
    """A tiny multi-country dataset + manifest for fast CLI/pipeline tests."""
    rng = np.random.default_rng(seed)
    labels = [f"ind{k}" for k in range(n_indicators)]
    labels[0] = "rule_of_law"
    labels[1] = "control_of_corruption"
    polarity = [1] * n_indicators
    polarity[-1] = -1
    pillar_names = ["governance", "economy", "social"]
    pillars = [pillar_names[k % 3] for k in range(n_indicators)]

    rows = []
    scale = rng.uniform(5, 50, n_indicators)
    offset = rng.uniform(-10, 10, n_indicators)
    for c in range(n_countries):
        base = rng.uniform(0.25, 0.55)
        start = np.clip(base + rng.uniform(-0.1, 0.1, n_indicators), 0.05, 0.8)
        end = np.clip(start + rng.uniform(0.08, 0.2, n_indicators), 0.1, 0.95)
        tt = np.linspace(0, 1, n_years)
        for y in range(n_years):
            level = start + (end - start) * tt[y] + rng.normal(0, 0.015, n_indicators)
            level = np.clip(level, 0.02, 0.98)
            raw = [
                offset[k] + scale[k] * (level[k] if polarity[k] > 0 else 1 - level[k])
                for k in range(n_indicators)
            ]
            rows.append(f"C{c},{2000 + y}," + ",".join(repr(float(v)) for v in raw))

    root.mkdir(parents=True, exist_ok=True)
    (root / "panel.csv").write_text(
        "country,year," + ",".join(labels) + "\n" + "\n".join(rows) + "\n"
    )
    (root / "metadata.csv").write_text(
        "indicator,polarity\n"
        + "\n".join(f"{lab},{pol}" for lab, pol in zip(labels, polarity))
        + "\n"
    )
    (root / "pillars.csv").write_text(
        "indicator,pillar\n"
        + "\n".join(f"{lab},{pil}" for lab, pil in zip(labels, pillars))
        + "\n"
    )
    manifest = {
        "panel": "panel.csv",
        "metadata": "metadata.csv",
        "pillars": "pillars.csv",
        "regimes": ["lax_uninformed"],
        "n_runs": n_runs,
        "discovery_runs": 10,
        "master_seed": 4242,
        "budget": 0.3,
        "rule_of_law": "rule_of_law",
        "control_of_corruption": "control_of_corruption",
        "max_periods": max_periods,
        "tolerance": tolerance,
    }
    if calibration:
        manifest["calibration_grid"] = [gamma / 2, gamma, gamma * 2]
        manifest["runs_per_grid_point"] = 6
        manifest["empirical_corruption"] = {
            f"C{c}": 0.5 for c in range(n_countries)
        }
    else:
        manifest["gamma"] = gamma
    (root / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return root / "manifest.json"


@pytest.fixture
def mini_manifest(tmp_path):
    return write_mini_dataset(tmp_path / "data")
