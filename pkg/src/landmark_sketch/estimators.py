"""Estimator wrappers so labelings fit into scikit-learn style pipelines.

``fit`` takes a :class:`~landmark_sketch.graph.Graph` (or an ``(m, 2)`` edge
array), ``predict`` takes an ``(k, 2)`` array of query pairs and returns the
estimated hop distances, with :data:`~landmark_sketch.graph.UNREACHABLE` for
pairs that share no landmark.
"""

from __future__ import annotations

import time

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .baselines import DasSarmaConfig, TZConfig, build_das_sarma, build_tz
from .evaluation import evaluate, sample_pairs
from .graph import Graph
from .labeling import BuildConfig, EdgeBoundary, Fixed, RadiusRule, build_approx, build_pruned, theoretical_params
from .labels import LandmarkLabels, query_distances, query_lookup_counts


def check_graph(G, directed: bool = False) -> Graph:
    """Accept a Graph or an integer edge array of shape ``(m, 2)``."""
    if isinstance(G, Graph):
        return G
    edges = np.asarray(G)
    if edges.ndim != 2 or edges.shape[1] != 2:
        raise ValueError(f"expected a Graph or an (m, 2) edge array, got shape {edges.shape}")
    if not np.issubdtype(edges.dtype, np.integer):
        raise ValueError("edge array must be integer typed")
    if edges.size and edges.min() < 0:
        raise ValueError("vertex ids must be non-negative")
    n = int(edges.max()) + 1 if edges.size else 0
    return Graph.from_edges(n, edges.astype(np.int64), directed)


def check_pairs(X, n: int) -> np.ndarray:
    """Validate an ``(k, 2)`` array of vertex pairs against ``n`` vertices."""
    pairs = np.asarray(X)
    if pairs.ndim == 1 and pairs.shape == (2,):
        pairs = pairs.reshape(1, 2)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ValueError(f"expected pairs of shape (k, 2), got {pairs.shape}")
    if not np.issubdtype(pairs.dtype, np.integer):
        raise ValueError("pair array must be integer typed")
    if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
        raise ValueError(f"pair vertex ids must lie in [0, {n})")
    return pairs.astype(np.int64)


class _LabelingEstimator(BaseEstimator):
    def _build(self, graph: Graph) -> LandmarkLabels:
        raise NotImplementedError

    def _config(self) -> dict:
        return self.get_params()

    def fit(self, G, y=None):
        graph = check_graph(G, getattr(self, "directed", False))
        start = time.perf_counter()
        self.labels_ = self._build(graph)
        self.build_time_ = time.perf_counter() - start
        self.graph_ = graph
        self.n_vertices_ = graph.n
        return self

    def _check_fitted(self):
        if not hasattr(self, "labels_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet")

    def predict(self, X) -> np.ndarray:
        self._check_fitted()
        pairs = check_pairs(X, self.n_vertices_)
        return query_distances(self.labels_, pairs[:, 0], pairs[:, 1])

    def lookup_counts(self, X) -> np.ndarray:
        self._check_fitted()
        pairs = check_pairs(X, self.n_vertices_)
        return query_lookup_counts(self.labels_, pairs[:, 0], pairs[:, 1])

    def score(self, X=None, y=None, n_pairs: int = 2000, seed: int = 0) -> float:
        """Negative relative average stretch on ``n_pairs`` sampled pairs (higher is better)."""
        self._check_fitted()
        report = evaluate(self.labels_, self.graph_, sample_pairs(self.graph_, n_pairs, seed))
        return -report.relative_average_stretch


class PrunedLandmarkLabeling(_LabelingEstimator):
    """Exact labeling by pruned BFS from every vertex."""

    def __init__(self, ordering="degree", directed: bool = False):
        self.ordering = ordering
        self.directed = directed

    def _build(self, graph):
        return build_pruned(graph, self.ordering)


class ApproximatePruning(_LabelingEstimator):
    """Pruned BFS from ``n_global`` hubs, degree-filtered local balls elsewhere.

    ``radius`` is an int (fixed radius) or any radius rule object.  With
    ``theory=True`` the hub count and an edge-boundary rule are derived from
    ``beta`` and ``nu`` at fit time, overriding ``n_global`` and ``radius``.
    """

    def __init__(
        self,
        n_global: int = 100,
        radius: int | RadiusRule = 2,
        ordering="degree",
        theory: bool = False,
        beta: float | None = None,
        nu: float | None = None,
        directed: bool = False,
    ):
        self.n_global = n_global
        self.radius = radius
        self.ordering = ordering
        self.theory = theory
        self.beta = beta
        self.nu = nu
        self.directed = directed

    def build_config(self, graph: Graph) -> BuildConfig:
        if self.theory:
            if self.beta is None or self.nu is None:
                raise ValueError("theory=True needs beta and nu")
            params = theoretical_params(graph, self.beta, self.nu)
            self.theoretical_params_ = params
            return BuildConfig("approx", self.ordering, params.H, params.radius_rule())
        rule = Fixed(self.radius) if isinstance(self.radius, (int, np.integer)) else self.radius
        return BuildConfig("approx", self.ordering, min(self.n_global, graph.n), rule)

    def _build(self, graph):
        self.config_ = self.build_config(graph)
        return build_approx(graph, self.config_)


class ThorupZwickSketch(_LabelingEstimator):
    """Global landmarks plus balls grown until the nearest one (3-stretch)."""

    def __init__(self, n_global: int | None = None, selection: str = "degree", random_state: int | None = None,
                 directed: bool = False):
        self.n_global = n_global
        self.selection = selection
        self.random_state = random_state
        self.directed = directed

    def _build(self, graph):
        return build_tz(graph, TZConfig(self.n_global, self.selection, self.random_state))


class DasSarmaSketch(_LabelingEstimator):
    """Nearest members of random seed sets of doubling size, unioned over repetitions."""

    def __init__(self, n_repetitions: int = 5, random_state: int = 0, directed: bool = False):
        self.n_repetitions = n_repetitions
        self.random_state = random_state
        self.directed = directed

    def _build(self, graph):
        return build_das_sarma(graph, DasSarmaConfig(self.n_repetitions, self.random_state))


__all__ = [
    "ApproximatePruning",
    "DasSarmaSketch",
    "EdgeBoundary",
    "PrunedLandmarkLabeling",
    "ThorupZwickSketch",
    "check_graph",
    "check_pairs",
]
