"""Seeded Erdős–Rényi and Chung-Lu random graph generators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from ._random import make_rng
from .graph import Graph

EXACT_PAIR_LIMIT = 2**15

# stream ids keep weights, edges and skips on independent Philox streams
_WEIGHT_STREAM = 1
_EDGE_STREAM = 2


@dataclass(frozen=True)
class WeightSequence:
    """Chung-Lu expected degrees drawn from a power law with density ``Z x^-beta`` on ``[x_min, inf)``."""

    weights: np.ndarray
    beta: float
    x_min: float

    @property
    def volume(self) -> float:
        return float(math.fsum(self.weights.tolist()))

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def normalizer(self) -> float:
        return (self.beta - 1.0) * self.x_min ** (self.beta - 1.0)


def power_law_inverse_cdf(u, beta: float, x_min: float):
    """Quantile function of the power law: ``x_min (1-u)^(-1/(beta-1))``."""
    return x_min * (1.0 - np.asarray(u, dtype=float)) ** (-1.0 / (beta - 1.0))


def sample_power_law_weights(n: int, beta: float, x_min: float, seed: int) -> WeightSequence:
    if beta <= 1:
        raise ValueError("beta must exceed 1 for the density to normalize")
    if x_min <= 0:
        raise ValueError("x_min must be positive")
    if n < 1:
        raise ValueError("n must be at least 1")
    u = make_rng(seed, _WEIGHT_STREAM).random(n)
    return WeightSequence(power_law_inverse_cdf(u, beta, x_min), float(beta), float(x_min))


def x_min_for_mean(beta: float, nu: float) -> float:
    """Lower cutoff giving the power law mean ``nu``."""
    if beta <= 2:
        raise ValueError("the mean only exists for beta > 2")
    if nu <= 0:
        raise ValueError("nu must be positive")
    return nu * (beta - 2.0) / (beta - 1.0)


def _pair_index_to_rows(k: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # lexicographic pairs (x, y), x < y; row x starts at x*n - x*(x+1)/2
    rows = np.arange(n, dtype=np.int64)
    starts = rows * n - rows * (rows + 1) // 2
    x = np.searchsorted(starts, k, side="right") - 1
    y = k - starts[x] + x + 1
    return x, y


def generate_er(n: int, p: float, seed: int) -> Graph:
    """G(n, p) by geometric skipping over the lexicographic pair order."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if n < 0:
        raise ValueError("n must be non-negative")
    total = n * (n - 1) // 2
    if p == 0 or total == 0:
        return Graph.from_edges(n, np.empty((0, 2), dtype=np.int64))
    if p == 1:
        k = np.arange(total, dtype=np.int64)
        return Graph.from_edges(n, np.column_stack(_pair_index_to_rows(k, n)))
    rng = make_rng(seed, _EDGE_STREAM)
    log_q = math.log1p(-p)
    chunks = []
    pos = -1
    batch = max(1024, int(1.2 * total * p) + 64)
    while pos < total:
        u = rng.random(batch)
        skips = np.floor(np.log1p(-u) / log_q).astype(np.int64) + 1
        idx = pos + np.cumsum(skips)
        chunks.append(idx[idx < total])
        pos = int(idx[-1])
    k = np.concatenate(chunks)
    return Graph.from_edges(n, np.column_stack(_pair_index_to_rows(k, n)))


def edge_probability(weights: WeightSequence, x, y):
    w = weights.weights
    return np.minimum(w[x] * w[y] / weights.volume, 1.0)


def _chung_lu_exact(weights: WeightSequence, rng: np.random.Generator) -> np.ndarray:
    # one uniform per pair, consumed in lexicographic (x < y) order
    w = weights.weights
    vol = weights.volume
    n = len(w)
    out = []
    for x in range(n - 1):
        u = rng.random(n - x - 1)
        q = np.minimum(w[x] * w[x + 1:] / vol, 1.0)
        ys = np.flatnonzero(u < q) + x + 1
        if ys.size:
            out.append(np.column_stack([np.full(ys.size, x, dtype=np.int64), ys]))
    return np.concatenate(out) if out else np.empty((0, 2), dtype=np.int64)


@numba.njit(cache=True)
def _chung_lu_skip_kernel(w_sorted, vol, uniforms):
    # Miller-Hagberg: skip geometrically under the (decreasing) row bound, then thin
    n = len(w_sorted)
    cap = 1024
    out = np.empty((2, cap), dtype=np.int64)
    m = 0
    t = 0
    for x in range(n - 1):
        y = x + 1
        p = min(w_sorted[x] * w_sorted[y] / vol, 1.0)
        while y < n and p > 0:
            if p < 1:
                r = uniforms[t]
                t += 1
                if t == len(uniforms):
                    return out[:, :m].copy(), -1
                y += int(math.floor(math.log(r) / math.log(1.0 - p)))
            if y < n:
                q = min(w_sorted[x] * w_sorted[y] / vol, 1.0)
                r = uniforms[t]
                t += 1
                if t == len(uniforms):
                    return out[:, :m].copy(), -1
                if r < q / p:
                    if m == cap:
                        grown = np.empty((2, 2 * cap), dtype=np.int64)
                        grown[:, :cap] = out
                        out = grown
                        cap *= 2
                    out[0, m] = x
                    out[1, m] = y
                    m += 1
                p = q
                y += 1
    return out[:, :m].copy(), t


def _chung_lu_skipping(weights: WeightSequence, rng: np.random.Generator) -> np.ndarray:
    order = np.argsort(-weights.weights, kind="stable")
    w_sorted = weights.weights[order]
    vol = weights.volume
    expected = float(w_sorted.sum())  # roughly 2m; each pair costs <= 2 draws
    budget = int(4 * expected) + 4 * len(w_sorted) + 1024
    while True:
        # log(r) needs r in (0, 1]
        uniforms = 1.0 - rng.random(budget)
        edges, used = _chung_lu_skip_kernel(w_sorted, vol, uniforms)
        if used >= 0:
            break
        budget *= 2
    return order[edges.T]


def generate_chung_lu(weights: WeightSequence, seed: int, method: str = "auto") -> Graph:
    """Undirected Chung-Lu graph: pair ``{x, y}`` is an edge w.p. ``min(p_x p_y / vol, 1)``.

    ``method="exact"`` draws one uniform per pair in lexicographic order;
    ``"skip"`` uses geometric skipping over weight-sorted vertices.  ``"auto"``
    picks exact up to :data:`EXACT_PAIR_LIMIT` vertices.
    """
    n = weights.n
    if n < 2:
        raise ValueError("need at least two vertices")
    if method == "auto":
        method = "exact" if n <= EXACT_PAIR_LIMIT else "skip"
    rng = make_rng(seed, _EDGE_STREAM)
    if method == "exact":
        edges = _chung_lu_exact(weights, rng)
    elif method == "skip":
        edges = _chung_lu_skipping(weights, rng)
    else:
        raise ValueError(f"unknown method {method!r}")
    return Graph.from_edges(n, edges)


def chung_lu_power_law(n: int, beta: float, seed: int, nu: float | None = None, x_min: float | None = None) -> Graph:
    """Random power-law graph with mean degree ``nu`` (or explicit ``x_min``)."""
    if (nu is None) == (x_min is None):
        raise ValueError("give exactly one of nu and x_min")
    if beta <= 2:
        raise ValueError("beta must exceed 2")
    if x_min is None:
        if nu <= 1:
            raise ValueError("nu must exceed 1")
        x_min = x_min_for_mean(beta, nu)
    return generate_chung_lu(sample_power_law_weights(n, beta, x_min, seed), seed)
