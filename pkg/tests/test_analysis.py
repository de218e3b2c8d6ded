import math

import numpy as np
import pytest
from scipy import stats as scipy_stats

from ppsim import CountryConfig, RegimeKind, RunResult
from ppsim.analysis import (
    CalibrationResult,
    PillarMap,
    calibrate_gamma,
    discover_profile,
    evaluate_regimes,
    pillar_gains,
    summarize_runs,
    ward_clusters,
    welch_t_test,
)

from conftest import toy_config


def symmetric_config(n=2, budget=1.0, gamma=1.5, max_periods=300):
    adjacency = np.full((n, n), 0.5)
    np.fill_diagonal(adjacency, 0.0)
    return CountryConfig(
        initial_indicators=np.full(n, 0.3),
        targets=np.full(n, 0.7),
        adjacency=adjacency,
        budget=budget,
        gamma=gamma,
        rule_of_law_idx=0,
        control_of_corruption_idx=1 % n,
        max_periods=max_periods,
    )


class TestWelch:
    def test_textbook_value(self):
        a = [2.1, 2.5, 2.3, 2.7]
        b = [3.0, 3.4, 3.2, 3.6]
        t, p = welch_t_test(np.array(a), np.array(b))
        # independent textbook computation
        ma, mb = np.mean(a), np.mean(b)
        va, vb = np.var(a, ddof=1), np.var(b, ddof=1)
        t_ref = (ma - mb) / math.sqrt(va / 4 + vb / 4)
        df_ref = (va / 4 + vb / 4) ** 2 / (
            (va / 4) ** 2 / 3 + (vb / 4) ** 2 / 3
        )
        p_ref = 2 * scipy_stats.t.sf(abs(t_ref), df_ref)
        assert t == pytest.approx(t_ref, abs=1e-12)
        assert t == pytest.approx(-4.929503017546496, abs=1e-12)
        assert p == pytest.approx(p_ref, abs=1e-12)
        assert p < 0.01

    def test_identical_samples_degenerate_p_one(self):
        x = np.array([1.0, 1.0, 1.0])
        t, p = welch_t_test(x, x)
        assert (t, p) == (0.0, 1.0)
        t, p = welch_t_test(x, np.array([2.0, 2.0]))
        assert p == 0.0 and t == -math.inf

    def test_identical_nondegenerate_samples(self):
        x = np.array([1.0, 2.0, 3.0])
        t, p = welch_t_test(x, x.copy())
        assert t == 0.0 and p == 1.0


def test_quantiles_linear_interpolation():
    s = summarize_runs(
        [
            RunResult(v, 1, True, np.array([v]), np.array([1.0]))
            for v in (1.0, 2.0, 3.0)
        ]
    )
    assert s.p50 == 2.0
    assert s.p25 == 1.5


class TestDiscovery:
    def test_symmetric_two_issue_split(self):
        cfg = symmetric_config()
        profile = discover_profile(cfg, 200, master_seed=5, threads=1)
        assert profile.sum() == pytest.approx(cfg.budget, rel=1e-9)
        assert profile[0] == pytest.approx(cfg.budget / 2, rel=0.05)

    def test_larger_gap_attracts_budget(self):
        # slow dynamics, so gaps keep their ordering over the whole horizon
        cfg = CountryConfig(
            initial_indicators=np.array([0.1, 0.7]),
            targets=np.array([0.9, 0.9]),  # issue 0 has quadruple the gap
            adjacency=np.zeros((2, 2)),
            budget=1.0,
            gamma=0.2,
            rule_of_law_idx=0,
            control_of_corruption_idx=1,
            max_periods=120,
        )
        profile = discover_profile(cfg, 100, master_seed=3, threads=1)
        assert profile[0] > profile[1]

    def test_final_period_variant_also_on_simplex(self):
        cfg = symmetric_config()
        profile = discover_profile(
            cfg, 20, master_seed=5, threads=1, final_period_only=True
        )
        assert profile.sum() == pytest.approx(cfg.budget, rel=1e-9)
        assert profile.min() >= 0

    def test_rejects_zero_runs(self):
        with pytest.raises(ValueError):
            discover_profile(symmetric_config(), 0, master_seed=1)


class TestEvaluateRegimes:
    def test_benchmark_self_comparison_degenerate(self):
        cfg = toy_config(n=3, seed=2, gamma=1.0, max_periods=80)
        stats = evaluate_regimes(
            cfg, [RegimeKind.LAX_UNINFORMED], 12, master_seed=9, threads=1
        )
        comp = stats.comparisons[RegimeKind.LAX_UNINFORMED]
        assert comp.efficiency_gain == 0.0
        assert comp.welch_t == 0.0 and comp.welch_p == 1.0

    def test_percentiles_within_sample_range(self):
        cfg = toy_config(n=3, seed=2, gamma=1.0, max_periods=80)
        stats = evaluate_regimes(
            cfg,
            [RegimeKind.LAX_UNINFORMED, RegimeKind.STRICT_UNINFORMED],
            15,
            master_seed=4,
            threads=1,
        )
        for summary in stats.regimes.values():
            assert summary.samples.min() <= summary.p25 <= summary.p50
            assert summary.p50 <= summary.samples.max()

    def test_benchmark_required(self):
        cfg = toy_config(n=3)
        with pytest.raises(ValueError, match="benchmark"):
            evaluate_regimes(cfg, [RegimeKind.STRICT_UNINFORMED], 5, master_seed=1)

    def test_informed_needs_profile(self):
        cfg = toy_config(n=3)
        with pytest.raises(ValueError, match="discovered"):
            evaluate_regimes(
                cfg,
                [RegimeKind.LAX_UNINFORMED, RegimeKind.LAX_INFORMED],
                5,
                master_seed=1,
            )

    def test_deterministic_in_master_seed(self):
        cfg = toy_config(n=3, seed=2, gamma=1.0, max_periods=60)
        kinds = [RegimeKind.LAX_UNINFORMED, RegimeKind.STRICT_UNINFORMED]
        a = evaluate_regimes(cfg, kinds, 10, master_seed=3, threads=1)
        b = evaluate_regimes(cfg, kinds, 10, master_seed=3, threads=1)
        for kind in kinds:
            assert np.array_equal(a.regimes[kind].samples, b.regimes[kind].samples)


def fake_results(per_issue_rows):
    out = []
    for row in per_issue_rows:
        row = np.asarray(row, dtype=float)
        out.append(RunResult(float(row.sum()), 5, True, row, row))
    return out


class TestPillarGains:
    def test_single_pillar_collapses_to_total(self):
        pillars = PillarMap(("all", "all", "all"))
        bench = fake_results([[0.5, 0.4, 0.3], [0.3, 0.2, 0.1]])
        alt = fake_results([[0.1, 0.1, 0.1], [0.1, 0.0, 0.1]])
        gains = pillar_gains(bench, alt, pillars)
        total = np.mean([r.corruption for r in bench]) - np.mean(
            [r.corruption for r in alt]
        )
        assert gains["all"] == pytest.approx(total, abs=1e-12)

    def test_zero_diversion_zero_gains(self):
        pillars = PillarMap(("a", "b"))
        bench = fake_results([[0.0, 0.0]])
        gains = pillar_gains(bench, bench, pillars)
        assert gains == {"a": 0.0, "b": 0.0}

    def test_gain_concentrated_where_diversion_differs(self):
        pillars = PillarMap(("p1", "p1", "p2"))
        bench = fake_results([[0.4, 0.2, 0.1], [0.6, 0.2, 0.1]])
        alt = fake_results([[0.1, 0.1, 0.1], [0.1, 0.1, 0.1]])
        gains = pillar_gains(bench, alt, pillars)
        assert gains["p2"] == pytest.approx(0.0, abs=1e-12)
        assert gains["p1"] == pytest.approx(0.5, abs=1e-12)

    def test_partition_identity(self):
        rng = np.random.default_rng(8)
        pillars = PillarMap(tuple(rng.choice(["a", "b", "c"], size=6)))
        bench = fake_results(rng.uniform(0, 1, (20, 6)))
        alt = fake_results(rng.uniform(0, 1, (20, 6)))
        gains = pillar_gains(bench, alt, pillars)
        total = np.mean([r.corruption for r in bench]) - np.mean(
            [r.corruption for r in alt]
        )
        assert sum(gains.values()) == pytest.approx(total, abs=1e-9)

    def test_per_indicator_normalization(self):
        pillars = PillarMap(("p1", "p1", "p2"))
        bench = fake_results([[0.4, 0.2, 0.3]])
        alt = fake_results([[0.0, 0.0, 0.3]])
        raw = pillar_gains(bench, alt, pillars)
        norm = pillar_gains(bench, alt, pillars, per_indicator=True)
        assert norm["p1"] == pytest.approx(raw["p1"] / 2, abs=1e-12)

    def test_incomplete_map_rejected(self):
        with pytest.raises(ValueError):
            pillar_gains(fake_results([[0.1, 0.2]]), fake_results([[0.1, 0.2]]),
                         PillarMap(("a",)))


class TestWardClusters:
    def test_singletons_when_k_equals_n(self):
        x = np.random.default_rng(0).normal(size=(5, 3))
        labels = ward_clusters(x, 5)
        assert sorted(labels.tolist()) == [1, 2, 3, 4, 5]

    def test_separated_blobs_recovered(self):
        rng = np.random.default_rng(1)
        a = rng.normal(0, 0.1, (10, 4))
        b = rng.normal(10, 0.1, (8, 4))
        labels = ward_clusters(np.vstack([a, b]), 2)
        assert len(set(labels[:10])) == 1
        assert len(set(labels[10:])) == 1
        assert labels[0] != labels[-1]

    def test_k_bounds(self):
        x = np.zeros((3, 2))
        with pytest.raises(ValueError):
            ward_clusters(x, 4)
        with pytest.raises(ValueError):
            ward_clusters(x, 0)

    def test_k_nonempty_clusters_fuzz(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            n = int(rng.integers(3, 20))
            k = int(rng.integers(1, n + 1))
            x = rng.normal(size=(n, 4))
            labels = ward_clusters(x, k)
            assert len(set(labels.tolist())) == k

    def test_deterministic(self):
        x = np.random.default_rng(3).normal(size=(12, 5))
        assert np.array_equal(ward_clusters(x, 4), ward_clusters(x, 4))


class TestCalibration:
    def test_single_candidate_returned_verbatim(self):
        cfg = symmetric_config(gamma=1.0, max_periods=60)
        result = calibrate_gamma([(cfg, 0.5)], [0.7], 4, seed=1, threads=1)
        assert result.gamma == 0.7
        assert result.grid[0][0] == 0.7
        assert math.isfinite(result.objective)

    def test_objective_finite_everywhere(self):
        cfg = symmetric_config(gamma=1.0, max_periods=60)
        result = calibrate_gamma(
            [(cfg, 0.4)], [0.5, 1.0, 2.0], 4, seed=2, threads=1
        )
        assert len(result.grid) == 3
        assert all(math.isfinite(e) for _, e in result.grid)
        assert result.objective == min(e for _, e in result.grid)

    def test_invalid_grid_rejected(self):
        cfg = symmetric_config()
        with pytest.raises(ValueError):
            calibrate_gamma([(cfg, 0.5)], [], 3, seed=1)
        with pytest.raises(ValueError):
            calibrate_gamma([(cfg, 0.5)], [0.5, -1.0], 3, seed=1)
