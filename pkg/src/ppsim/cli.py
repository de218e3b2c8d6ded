"""Command-line surface: network estimation, profile discovery, simulation
batches, regime evaluation, calibration, clustering, and report rendering.

Every output file carries the master seed and the manifest hash; identical
invocations reproduce byte-identical outputs regardless of PPSIM_THREADS.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import analysis, report
from .data import (
    RunManifest,
    assemble_country_panels,
    build_config,
    file_sha256,
    load_pillars,
    load_polarity,
    provenance_comment,
    read_csv,
    read_network_json,
    read_panel_csv,
    write_csv,
    write_edge_list_csv,
    write_json,
    write_network_json,
)
from .model import ALL_REGIME_KINDS, BENCHMARK_KIND, ConfigError, RegimeKind
from .network import estimate_network
from .simulation import run_ensemble


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except (ConfigError, ValueError, KeyError, OSError) as exc:
        message = " ".join(str(exc).split())
        print(f"error: {type(exc).__name__}: {message}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppsim",
        description="Policy-prioritization simulator and evaluation harness",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("estimate-network", help="estimate spillover networks from a panel CSV")
    p.add_argument("panel", type=Path)
    p.add_argument("--metadata", type=Path, help="polarity sidecar CSV (default: all positive)")
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--seed", type=int, default=0, help="recorded in provenance only")
    p.add_argument("--signed", action="store_true", help="keep correlation signs as weights")
    p.set_defaults(func=cmd_estimate_network)

    p = sub.add_parser("discover", help="discover allocation profiles per country")
    _manifest_args(p)
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("simulate", help="run Monte Carlo batches for the manifest regimes")
    _manifest_args(p)
    p.add_argument("--regimes", help="comma-separated regime kinds (overrides manifest)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="evaluate all four regimes and write statistics")
    _manifest_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("calibrate", help="grid-search the effectiveness parameter")
    _manifest_args(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("cluster", help="Ward-cluster countries from a features CSV")
    p.add_argument("features", type=Path)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--seed", type=int, default=0, help="recorded in provenance only")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("report", help="render tables and figures from an evaluation directory")
    p.add_argument("results_dir", type=Path)
    p.add_argument("--out", type=Path, help="default: <results-dir>/report")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("make-fixture", help="regenerate the bundled synthetic dataset")
    p.add_argument("--out", type=Path, default=Path("fixtures"))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--skip-calibration", action="store_true")
    p.set_defaults(func=cmd_make_fixture)
    return parser


def _manifest_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("manifest", type=Path)
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--runs", type=int, help="override the manifest run count")
    p.add_argument("--seed", type=int, help="override the manifest master seed")
    p.add_argument("--max-periods", type=int, help="override the period cap")
    p.add_argument("--tolerance", type=float, help="override the convergence tolerance")


def _load_manifest(args) -> RunManifest:
    manifest = RunManifest.from_path(args.manifest)
    if getattr(args, "runs", None) is not None:
        manifest.n_runs = max(1, args.runs)
    if getattr(args, "seed", None) is not None:
        manifest.master_seed = args.seed
    if getattr(args, "max_periods", None) is not None:
        manifest.max_periods = args.max_periods
    if getattr(args, "tolerance", None) is not None:
        manifest.tolerance = args.tolerance
    return manifest


def _country_setups(manifest: RunManifest, gamma: float | None = None):
    """(country, panel, network, config) for every country in the panel."""
    table = read_panel_csv(manifest.panel)
    polarity = load_polarity(manifest.metadata, table.labels)
    panels = assemble_country_panels(table, polarity)
    setups = []
    for country in table.countries:
        panel = panels[country]
        if country in manifest.networks:
            network = read_network_json(manifest.networks[country])
        else:
            network = estimate_network(panel, signed=manifest.signed_weights)
        cfg = build_config(manifest, panel, network, country, gamma=gamma)
        setups.append((country, panel, network, cfg))
    return setups


def _discover_all(manifest: RunManifest, setups) -> dict[str, np.ndarray]:
    return {
        country: analysis.discover_profile(
            cfg,
            manifest.discovery_runs,
            master_seed=manifest.master_seed + 17,
            tolerance=manifest.tolerance,
        )
        for country, _, _, cfg in setups
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_estimate_network(args) -> int:
    table = read_panel_csv(args.panel)
    if args.metadata:
        polarity = load_polarity(args.metadata, table.labels)
    else:
        polarity = np.ones(len(table.labels), dtype=int)
    panels = assemble_country_panels(table, polarity)
    prov = provenance_comment(args.seed, file_sha256(args.panel))
    for country in table.countries:
        network = estimate_network(panels[country], signed=args.signed)
        write_edge_list_csv(args.out / f"{country}_edges.csv", network, prov)
        write_network_json(
            args.out / f"{country}_network.json",
            network,
            args.seed,
            file_sha256(args.panel),
        )
    print(f"estimated {len(table.countries)} network(s) into {args.out}")
    return 0


def cmd_discover(args) -> int:
    manifest = _load_manifest(args)
    if getattr(args, "runs", None) is not None:
        manifest.discovery_runs = max(1, args.runs)
    setups = _country_setups(manifest)
    discovered = _discover_all(manifest, setups)
    prov = provenance_comment(manifest.master_seed, manifest.sha256)
    rows = []
    for country, panel, _, _ in setups:
        for k, label in enumerate(panel.labels):
            rows.append((country, label, discovered[country][k]))
    write_csv(
        args.out / "discovered_profiles.csv",
        ["country", "indicator", "allocation"],
        rows,
        prov,
    )
    print(f"discovered profiles for {len(setups)} country(ies)")
    return 0


def _regime_list(args, manifest: RunManifest) -> list[RegimeKind]:
    if getattr(args, "regimes", None):
        return [RegimeKind(k.strip()) for k in args.regimes.split(",") if k.strip()]
    return list(manifest.regimes)


def cmd_simulate(args) -> int:
    manifest = _load_manifest(args)
    kinds = _regime_list(args, manifest)
    setups = _country_setups(manifest)
    discovered = (
        _discover_all(manifest, setups) if any(k.informed for k in kinds) else {}
    )
    rows = []
    for country, _, _, cfg in setups:
        for kind in kinds:
            results = run_ensemble(
                cfg,
                kind,
                manifest.n_runs,
                manifest.master_seed,
                discovered=discovered.get(country),
                tolerance=manifest.tolerance,
            )
            for r_idx, res in enumerate(results):
                rows.append(
                    (
                        country,
                        kind.value,
                        r_idx,
                        res.corruption,
                        res.periods,
                        int(res.converged),
                    )
                )
    write_csv(
        args.out / "runs.csv",
        ["country", "regime", "run_index", "corruption", "periods", "converged"],
        rows,
        provenance_comment(manifest.master_seed, manifest.sha256),
    )
    print(f"simulated {len(rows)} runs")
    return 0


def cmd_evaluate(args) -> int:
    manifest = _load_manifest(args)
    kinds = list(ALL_REGIME_KINDS)
    setups = _country_setups(manifest)
    pillars = load_pillars(manifest.pillars, list(setups[0][1].labels))
    discovered = _discover_all(manifest, setups)
    prov = provenance_comment(manifest.master_seed, manifest.sha256)

    stats_obj: dict = {
        "n_runs": manifest.n_runs,
        "regimes": [k.value for k in kinds],
        "countries": {},
    }
    run_rows = []
    pillar_rows = []
    for country, panel, _, cfg in setups:
        per_regime_results = {}
        for kind in kinds:
            per_regime_results[kind] = run_ensemble(
                cfg,
                kind,
                manifest.n_runs,
                manifest.master_seed,
                discovered=discovered[country],
                tolerance=manifest.tolerance,
            )
            for r_idx, res in enumerate(per_regime_results[kind]):
                run_rows.append(
                    (
                        country,
                        kind.value,
                        r_idx,
                        res.corruption,
                        res.periods,
                        int(res.converged),
                    )
                )
        summaries = {
            kind: analysis.summarize_runs(results)
            for kind, results in per_regime_results.items()
        }
        benchmark = summaries[BENCHMARK_KIND]
        entry = {"budget": cfg.budget, "regimes": {}, "comparisons": {}}
        for kind in kinds:
            s = summaries[kind]
            entry["regimes"][kind.value] = {
                "mean": s.mean,
                "p25": s.p25,
                "p50": s.p50,
                "converged_fraction": s.converged_fraction,
                "mean_periods": s.mean_periods,
                "mean_per_issue_diversion": [
                    float(x) for x in s.mean_per_issue_diversion
                ],
            }
            t, p = analysis.welch_t_test(benchmark.samples, s.samples)
            entry["comparisons"][kind.value] = {
                "efficiency_gain": benchmark.mean - s.mean,
                "welch_t": t,
                "welch_p": p,
            }
            for per_indicator in (False, True):
                gains = analysis.pillar_gains(
                    per_regime_results[BENCHMARK_KIND],
                    per_regime_results[kind],
                    pillars,
                    per_indicator=per_indicator,
                )
                if not per_indicator:
                    for pillar, gain in gains.items():
                        pillar_rows.append(
                            (
                                country,
                                kind.value,
                                pillar,
                                gain,
                                gains[pillar] / len(pillars.indices(pillar)),
                            )
                        )
        stats_obj["countries"][country] = entry

    write_json(
        args.out / "ensemble_stats.json",
        stats_obj,
        manifest.master_seed,
        manifest.sha256,
    )
    write_csv(
        args.out / "runs.csv",
        ["country", "regime", "run_index", "corruption", "periods", "converged"],
        run_rows,
        prov,
    )
    write_csv(
        args.out / "pillar_gains.csv",
        ["country", "regime", "pillar", "gain", "gain_per_indicator"],
        pillar_rows,
        prov,
    )
    rows = [
        (country, label, discovered[country][k])
        for country, panel, _, _ in setups
        for k, label in enumerate(panel.labels)
    ]
    write_csv(
        args.out / "discovered_profiles.csv",
        ["country", "indicator", "allocation"],
        rows,
        prov,
    )
    print(f"evaluated {len(setups)} country(ies) x {len(kinds)} regimes")
    return 0


def cmd_calibrate(args) -> int:
    manifest = _load_manifest(args)
    if manifest.calibration_grid is None:
        raise ConfigError(["manifest has no calibration_grid"])
    if not manifest.empirical_corruption:
        raise ConfigError(["manifest has no empirical_corruption scores"])
    setups = _country_setups(manifest, gamma=manifest.calibration_grid[0])
    countries = []
    for country, _, _, cfg in setups:
        if country in manifest.empirical_corruption:
            countries.append((cfg, manifest.empirical_corruption[country]))
    if not countries:
        raise ConfigError(["no countries with empirical scores in the panel"])
    result = analysis.calibrate_gamma(
        countries,
        manifest.calibration_grid,
        manifest.runs_per_grid_point,
        manifest.master_seed,
        tolerance=manifest.tolerance,
    )
    write_json(
        args.out / "calibration.json",
        {
            "gamma": result.gamma,
            "objective": result.objective,
            "grid": [[g, e] for g, e in result.grid],
            "n_countries": len(countries),
        },
        manifest.master_seed,
        manifest.sha256,
    )
    print(f"calibrated gamma={result.gamma} (objective {result.objective:.3e})")
    return 0


def cmd_cluster(args) -> int:
    header, rows = read_csv(args.features)
    if header[0] != "country":
        raise ValueError("features CSV must have a leading country column")
    names = [r[0] for r in rows]
    features = np.array([[float(v) for v in r[1:]] for r in rows])
    labels = analysis.ward_clusters(features, args.k)
    write_csv(
        args.out / "clusters.csv",
        ["country", "cluster"],
        list(zip(names, labels.tolist())),
        provenance_comment(args.seed, file_sha256(args.features)),
    )
    print(f"clustered {len(names)} countries into {len(set(labels.tolist()))} groups")
    return 0


def cmd_report(args) -> int:
    out_dir = args.out if args.out else args.results_dir / "report"
    stats_path = args.results_dir / "ensemble_stats.json"
    prov_seed: object = "unknown"
    prov_sha = "unknown"
    if stats_path.exists():
        import json as _json

        prov = _json.loads(stats_path.read_text(encoding="utf-8")).get(
            "_provenance", {}
        )
        prov_seed = prov.get("master_seed", "unknown")
        prov_sha = prov.get("manifest_sha256", "unknown")
    written = report.render_report(
        args.results_dir, out_dir, provenance_comment(prov_seed, prov_sha)
    )
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_make_fixture(args) -> int:
    from .fixture import FIXTURE_SEED, generate_fixture

    seed = args.seed if args.seed is not None else FIXTURE_SEED
    info = generate_fixture(
        args.out, seed=seed, with_calibration=not args.skip_calibration
    )
    print(f"fixture written to {args.out} ({len(info['countries'])} countries)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
