"""Small graphs and slow-but-obvious reference implementations used as test oracles."""

from __future__ import annotations

import heapq
import math
from collections import deque

import numpy as np
import pytest

from landmark_sketch import Graph, UNREACHABLE, generate_er


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def er_graph(n: int, seed: int, directed: bool = False) -> Graph:
    if not directed:
        return generate_er(n, 2 * math.log(n) / n, seed)
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < 2 * math.log(n) / n
    np.fill_diagonal(mask, False)
    return Graph.from_edges(n, np.argwhere(mask), directed=True)


def adjacency(graph: Graph, backward: bool = False) -> list[list[int]]:
    nbrs = graph.in_neighbors if backward else graph.out_neighbors
    return [nbrs(v).tolist() for v in range(graph.n)]


def dijkstra_unit(graph: Graph, source: int, backward: bool = False) -> list[int]:
    """Unit-weight Dijkstra with a binary heap, independent of the library BFS."""
    adj = adjacency(graph, backward)
    dist = [UNREACHABLE] * graph.n
    dist[source] = 0
    heap = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v in adj[u]:
            if d + 1 < dist[v]:
                dist[v] = d + 1
                heapq.heappush(heap, (d + 1, v))
    return dist


def all_pairs(graph: Graph) -> list[list[int]]:
    return [dijkstra_unit(graph, s) for s in range(graph.n)]


def py_bfs(adj: list[list[int]], source: int) -> dict[int, int]:
    dist = {source: 0}
    q = deque([source])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist


def naive_query(labels, x: int, y: int) -> int:
    lf, lb = labels.forward_map(x), labels.backward_map(y)
    common = set(lf) & set(lb)
    return min((lf[z] + lb[z] for z in common), default=UNREACHABLE)


@pytest.fixture
def p4() -> Graph:
    return path_graph(4)


ACCEPTANCE: list[str] = []
"""One ``PASS``/``FAIL`` line per acceptance criterion, filled by test_acceptance.py."""


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
