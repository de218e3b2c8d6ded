"""Spillover-network estimation from indicator time series.

Two-step construction: a triangulated-maximal-filter skeleton keeps the
3(N-2) strongest similarity edges while staying planar, then each undirected
edge gets a direction from a pairwise nonlinear-correlation score on the
standardized series.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class IndicatorPanel:
    """One country's indicator time series: rows are years, columns issues."""

    values: np.ndarray
    labels: tuple[str, ...]
    years: tuple[int, ...] = ()

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError("panel values must be a 2-d matrix")
        if values.shape[0] < 3:
            raise ValueError("panel needs at least 3 observation rows")
        if len(self.labels) != values.shape[1]:
            raise ValueError("one label per column required")
        if not np.all(np.isfinite(values)):
            raise ValueError("panel has missing values; impute at ingestion")
        flat = values.std(axis=0) == 0.0
        if flat.any():
            bad = [self.labels[i] for i in np.flatnonzero(flat)]
            raise ValueError(f"zero-variance columns rejected: {bad}")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "years", tuple(int(y) for y in self.years))

    @property
    def n(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class DirectedSpilloverNetwork:
    """Weighted directed spillover graph.

    ``matrix[j, i]`` is the weight of edge j -> i (spending on issue j also
    advances issue i). ``tie_edges`` lists edges whose direction score was
    exactly zero and fell back to label order.
    """

    matrix: np.ndarray
    labels: tuple[str, ...]
    edges: tuple[tuple[int, int, float], ...]  # (source, target, weight)
    tie_edges: tuple[tuple[int, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "labels", tuple(self.labels))


def correlation_matrix(panel: IndicatorPanel) -> np.ndarray:
    """Pearson correlations between indicator columns; symmetric, unit
    diagonal. Zero-variance columns are already rejected by the panel."""
    corr = np.corrcoef(panel.values, rowvar=False)
    corr = (corr + corr.T) / 2.0  # kill float asymmetry from the BLAS product
    np.fill_diagonal(corr, 1.0)
    return np.clip(corr, -1.0, 1.0)


def _seed_clique(weights: np.ndarray) -> tuple[int, int, int, int]:
    """The 4 vertices whose 6 mutual similarities sum highest, ties to the
    lexicographically smallest quadruple."""
    n = weights.shape[0]
    best = -np.inf
    best_quad = None
    masked = np.full((n, n), -np.inf)
    iu = np.triu_indices(n, k=1)
    for a in range(n - 3):
        for b in range(a + 1, n - 2):
            v = weights[a] + weights[b]
            score = v[:, None] + v[None, :] + weights
            masked[:] = -np.inf
            masked[iu] = score[iu]
            masked[: b + 1, :] = -np.inf  # c must exceed b; d exceeds c via triu
            flat = np.argmax(masked)
            c, d = divmod(int(flat), n)
            s = masked[c, d] + weights[a, b]
            if s > best:
                best = s
                best_quad = (a, b, c, d)
    return best_quad


def tmfg(similarity: np.ndarray) -> np.ndarray:
    """Triangulated-maximal-filter skeleton of a symmetric similarity matrix.

    Seeds with the best 4-clique, then repeatedly inserts the unplaced vertex
    with the largest summed similarity to one of the current triangular
    faces, splitting that face in three. The result is a maximal planar
    graph with exactly 3(N-2) edges, returned as a lexicographically sorted
    (m, 2) array of undirected index pairs. Deterministic: argmax ties break
    toward the lowest vertex, then the earliest-created face.
    """
    w = np.asarray(similarity, dtype=float)
    n = w.shape[0]
    if w.ndim != 2 or w.shape != (n, n):
        raise ValueError("similarity must be square")
    if n < 4:
        raise ValueError("TMFG needs at least 4 vertices")
    if not np.allclose(w, w.T, atol=1e-12):
        raise ValueError("similarity must be symmetric")
    w = w.copy()
    np.fill_diagonal(w, 0.0)

    a, b, c, d = _seed_clique(w)
    edges = [(a, b), (a, c), (a, d), (b, c), (b, d), (c, d)]
    faces = [(a, b, c), (a, b, d), (a, c, d), (b, c, d)]

    max_faces = 3 * n - 8
    gains = np.full((n, max_faces), -np.inf)
    placed = np.zeros(n, dtype=bool)
    placed[[a, b, c, d]] = True
    for f, (x, y, z) in enumerate(faces):
        gains[:, f] = w[:, x] + w[:, y] + w[:, z]
    gains[placed, :] = -np.inf
    n_faces = 4

    for _ in range(n - 4):
        flat = int(np.argmax(gains[:, :n_faces]))
        v, f = divmod(flat, n_faces)
        x, y, z = faces[f]
        edges.extend([(v, x), (v, y), (v, z)])
        placed[v] = True
        gains[v, :] = -np.inf
        gains[:, f] = -np.inf
        for tri in ((x, y, v), (x, z, v), (y, z, v)):
            faces.append(tri)
            col = w[:, tri[0]] + w[:, tri[1]] + w[:, tri[2]]
            col[placed] = -np.inf
            gains[:, n_faces] = col
            n_faces += 1

    out = np.array(sorted(tuple(sorted(e)) for e in edges), dtype=int)
    assert out.shape == (3 * (n - 2), 2)
    return out


def direction_score(x: np.ndarray, y: np.ndarray) -> float:
    """Pairwise direction score on standardized series.

    ``rho * (mean[x * tanh(y)] - mean[tanh(x) * y])``; positive favors
    x -> y, negative y -> x, and the score is exactly antisymmetric in its
    arguments.
    """
    zx = _standardize(x)
    zy = _standardize(y)
    rho = float(np.mean(zx * zy))
    return rho * float(np.mean(zx * np.tanh(zy)) - np.mean(np.tanh(zx) * zy))


def _standardize(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    sd = x.std()
    if sd == 0.0:
        return np.zeros_like(x)
    return (x - x.mean()) / sd


def orient_edges(
    panel: IndicatorPanel, skeleton: np.ndarray, signed: bool = False
) -> DirectedSpilloverNetwork:
    """Assign one direction per skeleton edge and build the weight matrix.

    Weights are |rho| of the pair (or signed rho with ``signed=True``). A
    zero direction score falls back to label order (smaller label is the
    source) and the edge is flagged.
    """
    corr = np.corrcoef(panel.values, rowvar=False)
    n = panel.n
    matrix = np.zeros((n, n))
    edges: list[tuple[int, int, float]] = []
    ties: list[tuple[int, int]] = []
    for i, j in np.asarray(skeleton, dtype=int):
        i, j = int(i), int(j)
        score = direction_score(panel.values[:, i], panel.values[:, j])
        if score > 0:
            src, tgt = i, j
        elif score < 0:
            src, tgt = j, i
        else:
            src, tgt = sorted((i, j), key=lambda k: panel.labels[k])
            ties.append((src, tgt))
        rho = float(corr[i, j])
        weight = rho if signed else abs(rho)
        matrix[src, tgt] = weight
        edges.append((src, tgt, weight))
    return DirectedSpilloverNetwork(
        matrix=matrix,
        labels=panel.labels,
        edges=tuple(edges),
        tie_edges=tuple(ties),
    )


def estimate_network(panel: IndicatorPanel, signed: bool = False) -> DirectedSpilloverNetwork:
    """Full two-step estimation: |correlation| similarity, TMFG skeleton,
    then pairwise orientation."""
    similarity = np.abs(correlation_matrix(panel))
    skeleton = tmfg(similarity)
    return orient_edges(panel, skeleton, signed=signed)
