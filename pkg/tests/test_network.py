import math

import networkx as nx
import numpy as np
import pytest

from ppsim.network import (
    DirectedSpilloverNetwork,
    IndicatorPanel,
    correlation_matrix,
    direction_score,
    estimate_network,
    orient_edges,
    tmfg,
)


def random_panel(rng, years=12, n=6):
    values = rng.normal(size=(years, n)).cumsum(axis=0) + rng.normal(
        0, 0.1, (years, n)
    )
    return IndicatorPanel(values, labels=tuple(f"x{i}" for i in range(n)))


class TestIndicatorPanel:
    def test_rejects_short_panels(self):
        with pytest.raises(ValueError):
            IndicatorPanel(np.zeros((2, 4)), labels=("a", "b", "c", "d"))

    def test_rejects_missing_values(self):
        values = np.random.default_rng(0).normal(size=(5, 3))
        values[2, 1] = np.nan
        with pytest.raises(ValueError):
            IndicatorPanel(values, labels=("a", "b", "c"))

    def test_rejects_flat_columns(self):
        values = np.random.default_rng(0).normal(size=(5, 3))
        values[:, 2] = 1.0
        with pytest.raises(ValueError, match="zero-variance"):
            IndicatorPanel(values, labels=("a", "b", "c"))


class TestCorrelationMatrix:
    def test_unit_diagonal_and_symmetry(self):
        panel = random_panel(np.random.default_rng(1))
        corr = correlation_matrix(panel)
        assert np.allclose(np.diag(corr), 1.0)
        assert np.array_equal(corr, corr.T)

    def test_antiproportional_columns(self):
        x = np.linspace(0, 1, 10) + 0.01 * np.random.default_rng(2).normal(size=10)
        panel = IndicatorPanel(
            np.column_stack([x, -2 * x]), labels=("up", "down")
        )
        corr = correlation_matrix(panel)
        assert corr[0, 1] == pytest.approx(-1.0, abs=1e-9)

    def test_matches_textbook_pearson(self):
        rng = np.random.default_rng(3)
        values = rng.normal(size=(9, 4))
        panel = IndicatorPanel(values, labels=tuple("abcd"))
        corr = correlation_matrix(panel)
        for i in range(4):
            for j in range(4):
                x, y = values[:, i], values[:, j]
                xm, ym = x - x.mean(), y - y.mean()
                expected = (xm * ym).sum() / math.sqrt(
                    (xm**2).sum() * (ym**2).sum()
                )
                assert corr[i, j] == pytest.approx(expected, abs=1e-12)


class TestTmfg:
    def similarity(self, rng, n):
        m = rng.random((n, n))
        s = (m + m.T) / 2
        np.fill_diagonal(s, 1.0)
        return s

    def test_k4_for_four_vertices(self):
        edges = tmfg(self.similarity(np.random.default_rng(0), 4))
        assert edges.shape == (6, 2)
        assert {tuple(e) for e in edges} == {
            (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)
        }

    def test_ten_vertices_edge_count_and_planarity(self):
        edges = tmfg(self.similarity(np.random.default_rng(1), 10))
        assert edges.shape == (24, 2)
        ok, _ = nx.check_planarity(nx.Graph([tuple(e) for e in edges]))
        assert ok

    def test_block_structure_dominates_selection(self):
        # two tight clusters: intra-cluster similarity 0.9, cross 0.1
        n = 8
        s = np.full((n, n), 0.1)
        s[:4, :4] = 0.9
        s[4:, 4:] = 0.9
        np.fill_diagonal(s, 1.0)
        edges = tmfg(s)
        intra = sum(1 for a, b in edges if (a < 4) == (b < 4))
        assert intra >= 12  # both 4-cliques kept entirely

    def test_rejects_small_or_asymmetric_input(self):
        with pytest.raises(ValueError):
            tmfg(np.eye(3))
        bad = np.random.default_rng(2).random((5, 5))
        with pytest.raises(ValueError):
            tmfg(bad)

    def test_deterministic(self):
        s = self.similarity(np.random.default_rng(5), 20)
        assert np.array_equal(tmfg(s), tmfg(s))

    def test_structure_over_fuzzed_sizes(self):
        rng = np.random.default_rng(7)
        for n in (5, 9, 17, 33):
            for _ in range(3):
                edges = tmfg(self.similarity(rng, n))
                assert edges.shape == (3 * (n - 2), 2)
                graph = nx.Graph([tuple(e) for e in edges])
                assert graph.number_of_nodes() == n
                assert nx.check_planarity(graph)[0]


class TestOrientation:
    def test_antisymmetry_exact(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            x, y = rng.normal(size=(2, 40))
            assert direction_score(x, y) == -direction_score(y, x)

    def test_duplicated_series_ties_to_label_order(self):
        x = np.random.default_rng(1).normal(size=12)
        noise = np.random.default_rng(2).normal(size=12)
        panel = IndicatorPanel(
            np.column_stack([x, x, noise]), labels=("bbb", "aaa", "ccc")
        )
        net = orient_edges(panel, np.array([[0, 1]]))
        assert net.tie_edges == ((1, 0),)  # "aaa" is the source
        assert net.matrix[1, 0] > 0 and net.matrix[0, 1] == 0

    def test_causal_pair_recovery(self):
        hits = 0
        for rep in range(100):
            rng = np.random.default_rng(5000 + rep)
            x = rng.laplace(size=500)
            y = 0.8 * x + rng.uniform(-1, 1, 500)
            hits += direction_score(x, y) > 0
        assert hits >= 80

    def test_one_direction_per_edge_and_weight_magnitude(self):
        rng = np.random.default_rng(13)
        panel = random_panel(rng, years=15, n=7)
        net = estimate_network(panel)
        assert len(net.edges) == 3 * (7 - 2)
        corr = np.corrcoef(panel.values, rowvar=False)
        for s, t, w in net.edges:
            assert net.matrix[s, t] == w
            assert net.matrix[t, s] == 0.0
            assert w == pytest.approx(abs(corr[s, t]), abs=1e-12)
        assert np.all(np.diagonal(net.matrix) == 0.0)
        assert np.count_nonzero(net.matrix) == 15

    def test_signed_weights_flag(self):
        rng = np.random.default_rng(14)
        panel = random_panel(rng, years=15, n=6)
        signed = estimate_network(panel, signed=True)
        corr = np.corrcoef(panel.values, rowvar=False)
        for s, t, w in signed.edges:
            assert w == pytest.approx(corr[s, t], abs=1e-12)
