"""Data ingestion, normalization, run manifests, and on-disk formats.

All delimited output is UTF-8 CSV with a header row, '.' decimal separator,
and a leading provenance comment (master seed + manifest hash); structured
output is JSON with sorted keys and an embedded ``_provenance`` object.
Writers are byte-deterministic so identical inputs reproduce identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import PillarMap
from .model import ConfigError, CountryConfig, RegimeKind
from .network import DirectedSpilloverNetwork, IndicatorPanel

MISSING_LIMIT = 0.5  # columns with more missing values than this are rejected


# ---------------------------------------------------------------------------
# low-level CSV/JSON plumbing


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def provenance_comment(master_seed, manifest_sha: str) -> str:
    return f"# master_seed={master_seed} manifest_sha256={manifest_sha}"


def write_csv(path, header: list[str], rows, provenance: str | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        if provenance:
            fh.write(provenance + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    """Read a CSV, skipping '#' comment lines; returns (header, rows)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise ValueError(f"empty CSV: {path}")
    return rows[0], rows[1:]


def write_json(path, obj, master_seed=None, manifest_sha: str | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if manifest_sha is not None:
        obj = dict(obj)
        obj["_provenance"] = {
            "master_seed": master_seed,
            "manifest_sha256": manifest_sha,
        }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# panel ingestion


@dataclass
class PanelTable:
    """Raw multi-country panel as read from CSV; values may contain NaN."""

    labels: list[str]
    countries: list[str]
    years: dict[str, list[int]]
    values: dict[str, np.ndarray]  # per country, (years x indicators), NaN ok


def read_panel_csv(path) -> PanelTable:
    """Parse a panel CSV with columns ``country,year,<indicator...>``.

    Rows are grouped by country and sorted by year; empty cells become NaN.
    """
    header, rows = read_csv(path)
    if len(header) < 3 or header[0] != "country" or header[1] != "year":
        raise ValueError("panel CSV must start with country,year columns")
    labels = header[2:]
    per_country: dict[str, list[tuple[int, list[float]]]] = {}
    countries: list[str] = []
    for row in rows:
        country, year = row[0], int(row[1])
        vals = [float(c) if c != "" else math.nan for c in row[2:]]
        if len(vals) != len(labels):
            raise ValueError(f"row width mismatch for {country}/{year}")
        if country not in per_country:
            per_country[country] = []
            countries.append(country)
        per_country[country].append((year, vals))
    years = {}
    values = {}
    for country, recs in per_country.items():
        recs.sort(key=lambda r: r[0])
        years[country] = [y for y, _ in recs]
        values[country] = np.array([v for _, v in recs], dtype=float)
    return PanelTable(labels=labels, countries=countries, years=years, values=values)


def impute_series(series: np.ndarray) -> np.ndarray:
    """Fill missing values: linear interpolation inside the series, nearest
    observation at the ends. More than half missing is rejected."""
    series = np.asarray(series, dtype=float)
    missing = np.isnan(series)
    if not missing.any():
        return series
    if missing.mean() > MISSING_LIMIT:
        raise ValueError("series has more than 50% missing values")
    idx = np.arange(len(series))
    filled = series.copy()
    filled[missing] = np.interp(idx[missing], idx[~missing], series[~missing])
    return filled


def normalize_panel(raw: np.ndarray, polarity: np.ndarray) -> np.ndarray:
    """Min-max normalize each column over the pooled rows so the worst
    outcome is 0 and the best is 1; polarity -1 columns are reversed so that
    higher always means better. Constant columns are rejected."""
    raw = np.asarray(raw, dtype=float)
    polarity = np.asarray(polarity)
    lo = raw.min(axis=0)
    hi = raw.max(axis=0)
    if np.any(hi <= lo):
        bad = np.flatnonzero(hi <= lo).tolist()
        raise ValueError(f"constant columns cannot be normalized: {bad}")
    out = (raw - lo) / (hi - lo)
    flip = polarity < 0
    out[:, flip] = 1.0 - out[:, flip]
    return out


def assemble_country_panels(
    table: PanelTable, polarity: np.ndarray
) -> dict[str, IndicatorPanel]:
    """Impute per country, normalize over the pooled sample, and split back
    into per-country panels."""
    imputed = {}
    for country in table.countries:
        cols = [impute_series(table.values[country][:, k]) for k in range(len(table.labels))]
        imputed[country] = np.column_stack(cols)
    stacked = np.vstack([imputed[c] for c in table.countries])
    normalized = normalize_panel(stacked, polarity)
    panels = {}
    row = 0
    for country in table.countries:
        n_rows = imputed[country].shape[0]
        panels[country] = IndicatorPanel(
            values=normalized[row : row + n_rows],
            labels=tuple(table.labels),
            years=tuple(table.years[country]),
        )
        row += n_rows
    return panels


def load_polarity(path, labels: list[str]) -> np.ndarray:
    """Read the polarity sidecar (``indicator,polarity`` with +-1 values)."""
    header, rows = read_csv(path)
    if header[:2] != ["indicator", "polarity"]:
        raise ValueError("metadata CSV must have indicator,polarity columns")
    mapping = {r[0]: int(r[1]) for r in rows}
    missing = [lab for lab in labels if lab not in mapping]
    if missing:
        raise ValueError(f"metadata is missing polarity for: {missing}")
    if any(v not in (-1, 1) for v in mapping.values()):
        raise ValueError("polarity values must be 1 or -1")
    return np.array([mapping[lab] for lab in labels], dtype=int)


def load_pillars(path, labels: list[str]) -> PillarMap:
    """Read the pillar map (``indicator,pillar``); it must cover every label."""
    header, rows = read_csv(path)
    if header[:2] != ["indicator", "pillar"]:
        raise ValueError("pillar CSV must have indicator,pillar columns")
    mapping = {r[0]: r[1] for r in rows}
    missing = [lab for lab in labels if lab not in mapping]
    if missing:
        raise ValueError(f"pillar map is missing: {missing}")
    return PillarMap(tuple(mapping[lab] for lab in labels))


# ---------------------------------------------------------------------------
# network serialization


def write_edge_list_csv(path, network: DirectedSpilloverNetwork, provenance: str) -> None:
    rows = [
        (network.labels[s], network.labels[t], w) for s, t, w in network.edges
    ]
    write_csv(path, ["source", "target", "weight"], rows, provenance)


def write_network_json(path, network: DirectedSpilloverNetwork, master_seed, manifest_sha) -> None:
    obj = {
        "labels": list(network.labels),
        "matrix": [[float(x) for x in row] for row in network.matrix],
        "tie_edges": [list(e) for e in network.tie_edges],
    }
    write_json(path, obj, master_seed, manifest_sha)


def read_network_json(path) -> DirectedSpilloverNetwork:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    matrix = np.array(obj["matrix"], dtype=float)
    edges = tuple(
        (int(s), int(t), float(matrix[s, t]))
        for s, t in zip(*np.nonzero(matrix))
    )
    return DirectedSpilloverNetwork(
        matrix=matrix,
        labels=tuple(obj["labels"]),
        edges=edges,
        tie_edges=tuple(tuple(e) for e in obj.get("tie_edges", [])),
    )


# ---------------------------------------------------------------------------
# run manifest


@dataclass
class RunManifest:
    """Everything one evaluation campaign needs, loaded from JSON.

    Exactly one of ``gamma`` / ``calibration_grid`` is set. Paths are
    resolved relative to the manifest file and checked at load time.
    """

    panel: Path
    metadata: Path
    pillars: Path
    regimes: list[RegimeKind]
    n_runs: int
    discovery_runs: int
    master_seed: int
    budget: "dict[str, float] | float"
    rule_of_law: str
    control_of_corruption: str
    max_periods: int
    tolerance: float
    gamma: float | None = None
    calibration_grid: list[float] | None = None
    runs_per_grid_point: int = 50
    empirical_corruption: dict[str, float] = field(default_factory=dict)
    networks: dict[str, Path] = field(default_factory=dict)
    signed_weights: bool = False
    sha256: str = ""
    base_dir: Path = Path(".")

    @classmethod
    def from_path(cls, path) -> "RunManifest":
        path = Path(path)
        raw = json.loads(path.read_text(encoding="utf-8"))
        base = path.parent
        sha = file_sha256(path)

        def resolve(rel) -> Path:
            p = base / rel
            if not p.exists():
                raise ConfigError([f"manifest path not resolvable: {rel}"])
            return p

        gamma = raw.get("gamma")
        grid = raw.get("calibration_grid")
        if (gamma is None) == (grid is None):
            raise ConfigError(
                ["exactly one of gamma / calibration_grid must be present"]
            )
        n_runs = int(raw.get("n_runs", 1))
        if n_runs < 1:
            raise ConfigError(["n_runs must be >= 1"])
        networks = {
            country: resolve(rel)
            for country, rel in (raw.get("networks") or {}).items()
        }
        return cls(
            panel=resolve(raw["panel"]),
            metadata=resolve(raw["metadata"]),
            pillars=resolve(raw["pillars"]),
            regimes=[RegimeKind(k) for k in raw.get("regimes", ["lax_uninformed"])],
            n_runs=n_runs,
            discovery_runs=int(raw.get("discovery_runs", 100)),
            master_seed=int(raw.get("master_seed", 0)),
            budget=raw["budget"],
            rule_of_law=raw["rule_of_law"],
            control_of_corruption=raw["control_of_corruption"],
            max_periods=int(raw.get("max_periods", 10_000)),
            tolerance=float(raw.get("tolerance", 1e-4)),
            gamma=None if gamma is None else float(gamma),
            calibration_grid=None if grid is None else [float(g) for g in grid],
            runs_per_grid_point=int(raw.get("runs_per_grid_point", 50)),
            empirical_corruption={
                str(k): float(v)
                for k, v in (raw.get("empirical_corruption") or {}).items()
            },
            networks=networks,
            signed_weights=bool(raw.get("signed_weights", False)),
            sha256=sha,
            base_dir=base,
        )

    def budget_for(self, country: str) -> float:
        if isinstance(self.budget, dict):
            if country not in self.budget:
                raise ConfigError([f"no budget for country {country!r}"])
            return float(self.budget[country])
        return float(self.budget)


def build_config(
    manifest: RunManifest,
    panel: IndicatorPanel,
    network: DirectedSpilloverNetwork,
    country: str = "",
    gamma: float | None = None,
) -> CountryConfig:
    """Assemble a country's simulation config.

    Initial levels come from the earliest available year, targets from the
    latest; the spillover matrix and institutional indices are resolved
    against the panel labels. ``gamma`` falls back to the manifest value or,
    during calibration, a placeholder the grid search replaces.
    """
    if network.matrix.shape != (panel.n, panel.n):
        raise ConfigError(["network dimensions do not match the panel"])
    if tuple(network.labels) != tuple(panel.labels):
        raise ConfigError(["network labels do not match the panel"])

    def index_of(label: str) -> int:
        try:
            return panel.labels.index(label)
        except ValueError:
            raise ConfigError([f"indicator label not found: {label!r}"]) from None

    if gamma is None:
        gamma = manifest.gamma if manifest.gamma is not None else 1.0
    return CountryConfig(
        initial_indicators=panel.values[0],
        targets=panel.values[-1],
        adjacency=network.matrix,
        budget=manifest.budget_for(country),
        gamma=float(gamma),
        rule_of_law_idx=index_of(manifest.rule_of_law),
        control_of_corruption_idx=index_of(manifest.control_of_corruption),
        max_periods=manifest.max_periods,
        name=country,
    )
