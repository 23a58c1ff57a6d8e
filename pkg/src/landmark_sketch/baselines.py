"""Comparison sketches: a Thorup-Zwick style oracle and the Das Sarma et al. sketch."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from ._random import make_rng
from .graph import BACKWARD, FORWARD, Graph, degree_ordering
from .labels import LandmarkLabels

SELECTIONS = ("degree", "uniform")


@dataclass(frozen=True)
class TZConfig:
    """``H`` global landmarks (default ``ceil(sqrt(n))``) picked by degree or uniformly."""

    H: int | None = None
    selection: str = "degree"
    seed: int | None = None

    def __post_init__(self):
        if self.selection not in SELECTIONS:
            raise ValueError(f"unknown selection {self.selection!r}")
        if self.H is not None and self.H < 1:
            raise ValueError("H must be at least 1")
        if self.selection == "uniform" and self.seed is None:
            raise ValueError("uniform selection needs a seed")


@dataclass(frozen=True)
class DasSarmaConfig:
    repetitions: int = 5
    seed: int | None = None

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if self.seed is None:
            raise ValueError("das-sarma needs a seed")


@numba.njit(cache=True)
def _grow(out, p):
    if p < out.shape[1]:
        return out
    grown = np.empty((3, 2 * out.shape[1]), dtype=np.int64)
    grown[:, : out.shape[1]] = out
    return grown


@numba.njit(cache=True)
def _tz_kernel(ptr, idx, sources, n):
    """Full BFS per global landmark, triples ``(reached, landmark, dist)``."""
    out = np.empty((3, max(16, n)), dtype=np.int64)
    p = 0
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(max(n, 1), dtype=np.int32)
    for g in sources:
        queue[0] = g
        dist[g] = 0
        head, tail = 0, 1
        while head < tail:
            u = queue[head]
            head += 1
            out = _grow(out, p)
            out[0, p] = u
            out[1, p] = g
            out[2, p] = dist[u]
            p += 1
            for k in range(ptr[u], ptr[u + 1]):
                y = idx[k]
                if dist[y] < 0:
                    dist[y] = dist[u] + 1
                    queue[tail] = y
                    tail += 1
        for k in range(tail):
            dist[queue[k]] = -1
    return out[:, :p].copy()


@numba.njit(cache=True)
def _tz_ball_kernel(ptr, idx, vertices, is_global, n):
    """Balls grown level by level, stopping after the first level holding a global landmark."""
    out = np.empty((3, max(16, n)), dtype=np.int64)
    p = 0
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(max(n, 1), dtype=np.int32)
    for v in vertices:
        queue[0] = v
        dist[v] = 0
        head, tail = 0, 1
        while head < tail:
            level_end = tail
            hit = False
            for k in range(head, level_end):
                if is_global[queue[k]]:
                    hit = True
            if hit:
                break
            while head < level_end:
                u = queue[head]
                head += 1
                for k in range(ptr[u], ptr[u + 1]):
                    y = idx[k]
                    if dist[y] < 0:
                        dist[y] = dist[u] + 1
                        queue[tail] = y
                        tail += 1
        for k in range(tail):
            y = queue[k]
            out = _grow(out, p)
            out[0, p] = v
            out[1, p] = y
            out[2, p] = dist[y]
            p += 1
            dist[y] = -1
    return out[:, :p].copy()


def _select_global(graph: Graph, config: TZConfig) -> np.ndarray:
    H = config.H if config.H is not None else math.ceil(math.sqrt(graph.n))
    H = min(H, graph.n)
    if config.selection == "degree":
        return degree_ordering(graph)[:H]
    return np.sort(make_rng(config.seed).choice(graph.n, size=H, replace=False)).astype(np.int64)


def build_tz(graph: Graph, config: TZConfig = TZConfig()) -> LandmarkLabels:
    """Global landmarks label everything they reach; other vertices keep a ball up to the nearest one."""
    n = graph.n
    globals_ = _select_global(graph, config)
    is_global = np.zeros(n, dtype=np.bool_)
    is_global[globals_] = True
    others = np.flatnonzero(~is_global).astype(np.int64)

    def side(direction_for_globals, direction_for_balls):
        ptr, idx = graph.csr(direction_for_globals)
        g = _tz_kernel(ptr, idx, globals_, n)
        ptr, idx = graph.csr(direction_for_balls)
        b = _tz_ball_kernel(ptr, idx, others, is_global, n)
        return tuple(np.concatenate([g[i], b[i]]) for i in range(3))

    # L_F(u) holds dist(u, g): found by BFS from g along in-edges
    fwd = side(BACKWARD, FORWARD)
    bwd = side(FORWARD, BACKWARD) if graph.directed else None
    return LandmarkLabels.from_entries(n, graph.directed, fwd, bwd)


@numba.njit(cache=True)
def _nearest_seed_kernel(ptr, idx, seeds, n):
    """Multi-source BFS; ties between equally near seeds go to the lowest id."""
    dist = np.full(n, -1, dtype=np.int64)
    owner = np.full(n, -1, dtype=np.int64)
    queue = np.empty(max(n, 1), dtype=np.int32)
    tail = 0
    for s in seeds:
        dist[s] = 0
        owner[s] = s
        queue[tail] = s
        tail += 1
    head = 0
    while head < tail:
        level_end = tail
        # owners of this level are final before the next level is touched
        for k in range(head, level_end):
            u = queue[k]
            for j in range(ptr[u], ptr[u + 1]):
                y = idx[j]
                if dist[y] < 0:
                    dist[y] = dist[u] + 1
                    owner[y] = owner[u]
                    queue[tail] = y
                    tail += 1
                elif dist[y] == dist[u] + 1 and owner[u] < owner[y]:
                    owner[y] = owner[u]
        head = level_end
    return owner, dist


def nearest_seed(graph: Graph, seeds, direction: str = FORWARD) -> tuple[np.ndarray, np.ndarray]:
    """Closest seed to every vertex (``-1`` if none reaches it) and its distance."""
    ptr, idx = graph.csr(direction)
    return _nearest_seed_kernel(ptr, idx, np.asarray(seeds, dtype=np.int64), graph.n)


def seed_sets(n: int, config: DasSarmaConfig, repetition: int) -> list[np.ndarray]:
    """Seed sets ``S_0..S_L`` of sizes ``min(2^i, n)`` for one repetition, ``L = floor(log2 n)``."""
    rng = make_rng(config.seed, repetition)
    top = int(math.floor(math.log2(n))) if n > 0 else -1
    return [rng.choice(n, size=min(2**i, n), replace=False) for i in range(top + 1)]


def build_das_sarma(graph: Graph, config: DasSarmaConfig) -> LandmarkLabels:
    """Union over repetitions of each vertex's nearest member of every seed set.

    Every vertex also keeps itself at distance 0.
    """
    n = graph.n
    self_ids = np.arange(n, dtype=np.int64)
    parts = {FORWARD: [(self_ids, self_ids, np.zeros(n, dtype=np.int64))]}
    if graph.directed:
        parts[BACKWARD] = [parts[FORWARD][0]]
    for rep in range(config.repetitions):
        for seeds in seed_sets(n, config, rep):
            for side in parts:
                # L_F(x) needs the seed nearest *from* x, so search along in-edges
                search = BACKWARD if side == FORWARD and graph.directed else FORWARD
                owner, dist = nearest_seed(graph, seeds, search)
                hit = owner >= 0
                parts[side].append((self_ids[hit], owner[hit], dist[hit]))

    def cat(chunks):
        return tuple(np.concatenate([c[i] for c in chunks]) for i in range(3))

    fwd = cat(parts[FORWARD])
    bwd = cat(parts[BACKWARD]) if graph.directed else None
    return LandmarkLabels.from_entries(n, graph.directed, fwd, bwd)
