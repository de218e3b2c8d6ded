"""Report rendering: summary tables (CSV) and figures (PNG) from an
evaluation output directory."""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .data import read_csv, write_csv
from .model import BENCHMARK_KIND

REGIME_STYLE = {
    "lax_uninformed": ("#1f77b4", "benchmark (lax-uninformed)"),
    "strict_uninformed": ("#7f7f7f", "strict-uninformed"),
    "lax_informed": ("#2ca02c", "lax-informed"),
    "strict_informed": ("#ff7f0e", "strict-informed"),
}

FIG_DPI = 150


def load_evaluation(results_dir) -> dict:
    """Read the files `evaluate` writes: stats JSON plus per-run samples."""
    results_dir = Path(results_dir)
    stats_path = results_dir / "ensemble_stats.json"
    if not stats_path.exists():
        raise FileNotFoundError(f"no ensemble_stats.json under {results_dir}")
    stats = json.loads(stats_path.read_text(encoding="utf-8"))

    samples: dict[tuple[str, str], list[float]] = {}
    runs_path = results_dir / "runs.csv"
    if runs_path.exists():
        header, rows = read_csv(runs_path)
        col = {name: i for i, name in enumerate(header)}
        for row in rows:
            key = (row[col["country"]], row[col["regime"]])
            samples.setdefault(key, []).append(float(row[col["corruption"]]))

    pillar_rows = []
    pillar_path = results_dir / "pillar_gains.csv"
    if pillar_path.exists():
        header, rows = read_csv(pillar_path)
        col = {name: i for i, name in enumerate(header)}
        pillar_rows = [
            (
                row[col["country"]],
                row[col["regime"]],
                row[col["pillar"]],
                float(row[col["gain"]]),
            )
            for row in rows
        ]
    return {"stats": stats, "samples": samples, "pillars": pillar_rows}


def _sorted_countries(stats: dict) -> list[str]:
    countries = stats["countries"]
    bench = BENCHMARK_KIND.value
    return sorted(
        countries, key=lambda c: countries[c]["regimes"][bench]["mean"]
    )


def write_summary_tables(evaluation: dict, out_dir, provenance: str) -> list[Path]:
    """Per-country regime summary and pooled pillar tables."""
    out_dir = Path(out_dir)
    stats = evaluation["stats"]
    rows = []
    for country in _sorted_countries(stats):
        entry = stats["countries"][country]
        for regime, summary in sorted(entry["regimes"].items()):
            comp = entry["comparisons"].get(regime, {})
            rows.append(
                (
                    country,
                    regime,
                    summary["mean"],
                    summary["p25"],
                    summary["p50"],
                    summary["converged_fraction"],
                    summary["mean_periods"],
                    comp.get("efficiency_gain", ""),
                    comp.get("welch_t", ""),
                    comp.get("welch_p", ""),
                )
            )
    summary_path = out_dir / "regime_summary.csv"
    write_csv(
        summary_path,
        [
            "country",
            "regime",
            "mean_corruption",
            "p25",
            "p50",
            "converged_fraction",
            "mean_periods",
            "efficiency_gain",
            "welch_t",
            "welch_p",
        ],
        rows,
        provenance,
    )

    written = [summary_path]
    if evaluation["pillars"]:
        pooled: dict[tuple[str, str], list[float]] = {}
        for _, regime, pillar, gain in evaluation["pillars"]:
            pooled.setdefault((regime, pillar), []).append(gain)
        pooled_rows = [
            (regime, pillar, float(np.mean(gains)))
            for (regime, pillar), gains in sorted(pooled.items())
        ]
        pooled_path = out_dir / "pillar_gains_pooled.csv"
        write_csv(
            pooled_path, ["regime", "pillar", "mean_gain"], pooled_rows, provenance
        )
        written.append(pooled_path)
    return written


def figure_regime_bands(evaluation: dict) -> plt.Figure:
    """Countries sorted by benchmark corruption; per-regime mean lines with
    shaded 25th-to-50th percentile bands."""
    stats = evaluation["stats"]
    countries = _sorted_countries(stats)
    x = np.arange(len(countries))
    fig, ax = plt.subplots(figsize=(9.0, 4.6))
    for regime, (color, label) in REGIME_STYLE.items():
        if regime not in stats.get("regimes", list(REGIME_STYLE)):
            continue
        entries = [stats["countries"][c]["regimes"].get(regime) for c in countries]
        if any(e is None for e in entries):
            continue
        means = [e["mean"] for e in entries]
        p25 = [e["p25"] for e in entries]
        p50 = [e["p50"] for e in entries]
        ax.plot(x, means, color=color, label=label, lw=1.8)
        ax.fill_between(x, p25, p50, color=color, alpha=0.25, lw=0)
    ax.set_xticks(x)
    ax.set_xticklabels(countries, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("corruption (budget-normalized diversion)")
    ax.set_xlabel("country, sorted by benchmark corruption")
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    return fig


def figure_pillar_gains(evaluation: dict) -> plt.Figure:
    """Pooled mean efficiency gain per development pillar, one panel per
    alternative regime."""
    pooled: dict[str, dict[str, list[float]]] = {}
    for _, regime, pillar, gain in evaluation["pillars"]:
        pooled.setdefault(regime, {}).setdefault(pillar, []).append(gain)
    regimes = [r for r in REGIME_STYLE if r in pooled and r != BENCHMARK_KIND.value]
    if not regimes:
        raise ValueError("no pillar gains to plot")
    pillars = sorted({p for by_pillar in pooled.values() for p in by_pillar})
    fig, axes = plt.subplots(
        1, len(regimes), figsize=(3.4 * len(regimes), 4.2), sharey=True
    )
    axes = np.atleast_1d(axes)
    y = np.arange(len(pillars))
    for ax, regime in zip(axes, regimes):
        color, label = REGIME_STYLE[regime]
        means = [float(np.mean(pooled[regime].get(p, [0.0]))) for p in pillars]
        ax.barh(y, means, color=color, alpha=0.85)
        ax.axvline(0.0, color="black", lw=0.8)
        ax.set_title(label, fontsize=9)
        ax.set_xlabel("mean efficiency gain")
    axes[0].set_yticks(y)
    axes[0].set_yticklabels(pillars, fontsize=8)
    fig.tight_layout()
    return fig


def figure_distributions(evaluation: dict, max_countries: int = 4) -> plt.Figure:
    """Corruption histograms, benchmark vs. informed regimes, for countries
    spread across the benchmark-corruption range."""
    stats = evaluation["stats"]
    samples = evaluation["samples"]
    countries = _sorted_countries(stats)
    if not samples:
        raise ValueError("no per-run samples to plot")
    if len(countries) > max_countries:
        picks = np.linspace(0, len(countries) - 1, max_countries).astype(int)
        countries = [countries[i] for i in picks]
    ncols = 2
    nrows = int(np.ceil(len(countries) / ncols))
    fig, axes = plt.subplots(nrows, ncols, figsize=(8.6, 3.0 * nrows))
    for ax, country in zip(np.ravel(axes), countries):
        for regime in ("lax_uninformed", "lax_informed", "strict_informed"):
            vals = samples.get((country, regime))
            if not vals:
                continue
            color, label = REGIME_STYLE[regime]
            ax.hist(vals, bins=30, color=color, alpha=0.45, label=label, density=True)
        ax.set_title(country, fontsize=9)
        ax.set_xlabel("corruption")
    for ax in np.ravel(axes)[len(countries) :]:
        ax.set_visible(False)
    np.ravel(axes)[0].legend(fontsize=7, frameon=False)
    fig.tight_layout()
    return fig


def render_report(results_dir, out_dir, provenance: str) -> list[Path]:
    """Write all tables and figures for one evaluation directory."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    evaluation = load_evaluation(results_dir)
    written = write_summary_tables(evaluation, out_dir, provenance)
    figures = [("regime_comparison.png", figure_regime_bands)]
    if evaluation["pillars"]:
        figures.append(("pillar_gains.png", figure_pillar_gains))
    if evaluation["samples"]:
        figures.append(("corruption_distributions.png", figure_distributions))
    for fname, fn in figures:
        fig = fn(evaluation)
        path = out_dir / fname
        fig.savefig(path, dpi=FIG_DPI)
        plt.close(fig)
        written.append(path)
    return written
