"""Immutable CSR graph, edge-list ingestion and BFS primitives."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable

import numba
import numpy as np

UNREACHABLE = int(np.iinfo(np.uint32).max)
"""Sentinel hop distance for vertices that cannot be reached."""

FORWARD = "forward"
BACKWARD = "backward"


class EdgeListError(ValueError):
    """Raised for a malformed edge-list line."""

    def __init__(self, lineno: int, line: str):
        super().__init__(f"line {lineno}: expected two integer tokens, got {line!r}")
        self.lineno = lineno


def _csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((dst, src))
    indices = dst[order].astype(np.int32)
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, indices


@dataclass(frozen=True, eq=False)
class Graph:
    """Unweighted simple graph stored as sorted CSR neighbor arrays.

    Undirected graphs are stored symmetrically and share one CSR for both
    directions.  ``original_ids[v]`` is the id vertex ``v`` had in the input.
    """

    n: int
    directed: bool
    out_indptr: np.ndarray
    out_indices: np.ndarray
    in_indptr: np.ndarray
    in_indices: np.ndarray
    original_ids: np.ndarray = field(repr=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: np.ndarray | Iterable[tuple[int, int]],
        directed: bool = False,
        original_ids: np.ndarray | None = None,
    ) -> "Graph":
        """Build a graph on vertices ``0..n-1``; self-loops and duplicates are dropped."""
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range [0, n)")
        e = e[e[:, 0] != e[:, 1]]
        if not directed:
            e = np.concatenate([e, e[:, ::-1]])
        if e.size:
            e = np.unique(e, axis=0)
        src, dst = e[:, 0], e[:, 1]
        out_indptr, out_indices = _csr(n, src, dst)
        if directed:
            in_indptr, in_indices = _csr(n, dst, src)
        else:
            in_indptr, in_indices = out_indptr, out_indices
        if original_ids is None:
            original_ids = np.arange(n, dtype=np.int64)
        for a in (out_indptr, out_indices, in_indptr, in_indices, original_ids):
            a.setflags(write=False)
        return cls(n, directed, out_indptr, out_indices, in_indptr, in_indices, original_ids)

    @property
    def num_edges(self) -> int:
        """Directed arc count, or undirected edge count."""
        m = int(self.out_indptr[-1])
        return m if self.directed else m // 2

    @property
    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_indptr)

    @property
    def in_degree(self) -> np.ndarray:
        return np.diff(self.in_indptr)

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.out_indices[self.out_indptr[v]:self.out_indptr[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.in_indices[self.in_indptr[v]:self.in_indptr[v + 1]]

    def edges(self) -> np.ndarray:
        """Edge array of shape (m, 2); undirected edges appear once with u < v."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.out_degree)
        e = np.column_stack([src, self.out_indices.astype(np.int64)])
        if not self.directed:
            e = e[e[:, 0] < e[:, 1]]
        return e

    def csr(self, direction: str = FORWARD) -> tuple[np.ndarray, np.ndarray]:
        if direction == FORWARD:
            return self.out_indptr, self.out_indices
        if direction == BACKWARD:
            return self.in_indptr, self.in_indices
        raise ValueError(f"unknown direction {direction!r}")

    def degree(self, direction: str = FORWARD) -> np.ndarray:
        """Out-degrees for ``forward``, in-degrees for ``backward``."""
        indptr, _ = self.csr(direction)
        return np.diff(indptr)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.directed == other.directed
            and np.array_equal(self.out_indptr, other.out_indptr)
            and np.array_equal(self.out_indices, other.out_indices)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.directed, self.out_indices.tobytes()))


def load_edge_list(source: BinaryIO | bytes | str, directed: bool = False) -> Graph:
    """Parse a whitespace-delimited ``u v`` edge list with ``#`` comment lines.

    ``source`` may be a binary stream, raw bytes, or a path.  Vertex ids are
    compacted to ``0..n-1`` in ascending order of their original value.
    """
    if isinstance(source, str):
        with open(source, "rb") as fh:
            data = fh.read()
    elif isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    else:
        data = source.read()
    us: list[int] = []
    vs: list[int] = []
    for lineno, raw in enumerate(data.decode().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListError(lineno, raw)
        try:
            us.append(int(parts[0]))
            vs.append(int(parts[1]))
        except ValueError:
            raise EdgeListError(lineno, raw) from None
    if not us:
        return Graph.from_edges(0, np.empty((0, 2), dtype=np.int64), directed)
    raw_edges = np.column_stack([np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64)])
    original_ids, compact = np.unique(raw_edges, return_inverse=True)
    return Graph.from_edges(len(original_ids), compact.reshape(-1, 2), directed, original_ids)


def write_edge_list(graph: Graph, sink: BinaryIO, header: str | None = None) -> None:
    """Write ``graph`` in the edge-list format read by :func:`load_edge_list`.

    Reloading gives back an equal graph, isolated vertices included.
    """
    buf = io.StringIO()
    if header:
        for line in header.splitlines():
            buf.write(f"# {line}\n")
    e = graph.edges()
    ids = graph.original_ids
    for u, v in zip(ids[e[:, 0]].tolist(), ids[e[:, 1]].tolist()):
        buf.write(f"{u} {v}\n")
    # isolated vertices survive as self-loop lines: the loader keeps the id, drops the edge
    isolated = np.flatnonzero((graph.out_degree == 0) & (graph.in_degree == 0))
    for v in ids[isolated].tolist():
        buf.write(f"{v} {v}\n")
    sink.write(buf.getvalue().encode())


@numba.njit(cache=True)
def _bfs_kernel(indptr, indices, source, n):
    dist = np.full(n, np.uint32(0xFFFFFFFF), dtype=np.uint32)
    queue = np.empty(n, dtype=np.int32)
    dist[source] = 0
    queue[0] = source
    head, tail = 0, 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + np.uint32(1)
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if dist[v] == np.uint32(0xFFFFFFFF):
                dist[v] = du
                queue[tail] = v
                tail += 1
    return dist


@numba.njit(cache=True)
def _bounded_bfs_kernel(indptr, indices, source, radius, dist):
    # ``dist`` is a caller-owned scratch array of UNREACHABLE; restored on exit.
    order = [np.int32(source)]
    dist[source] = 0
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        if dist[u] >= radius:
            continue
        du = dist[u] + np.uint32(1)
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if dist[v] == np.uint32(0xFFFFFFFF):
                dist[v] = du
                order.append(v)
    verts = np.empty(len(order), dtype=np.int32)
    ds = np.empty(len(order), dtype=np.uint32)
    for i in range(len(order)):
        verts[i] = order[i]
        ds[i] = dist[order[i]]
        dist[order[i]] = np.uint32(0xFFFFFFFF)
    return verts, ds


@numba.njit(cache=True)
def _edge_boundary_kernel(indptr, indices, source, level, n):
    dist = np.full(n, np.uint32(0xFFFFFFFF), dtype=np.uint32)
    verts, _ = _bounded_bfs_kernel(indptr, indices, source, level, dist)
    for v in verts:
        dist[v] = 0
    count = 0
    for u in verts:
        for k in range(indptr[u], indptr[u + 1]):
            if dist[indices[k]] != 0:
                count += 1
    return count


def _check_vertex(graph: Graph, v: int) -> None:
    if not 0 <= v < graph.n:
        raise IndexError(f"vertex {v} out of range [0, {graph.n})")


def bfs(graph: Graph, source: int, direction: str = FORWARD) -> np.ndarray:
    """Hop distances from ``source`` (``backward`` follows in-edges).

    Returns a ``uint32`` array with :data:`UNREACHABLE` where there is no path.
    """
    _check_vertex(graph, source)
    indptr, indices = graph.csr(direction)
    return _bfs_kernel(indptr, indices, source, graph.n)


def bounded_bfs(graph: Graph, source: int, radius: int, direction: str = FORWARD) -> dict[int, int]:
    """Map of every vertex within ``radius`` hops to its exact distance."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    _check_vertex(graph, source)
    indptr, indices = graph.csr(direction)
    scratch = np.full(graph.n, UNREACHABLE, dtype=np.uint32)
    verts, ds = _bounded_bfs_kernel(indptr, indices, source, min(radius, graph.n), scratch)
    return dict(zip(verts.tolist(), ds.tolist()))


def level_sets(ball: dict[int, int]) -> list[list[int]]:
    """Split a :func:`bounded_bfs` ball into sorted level sets ``Γ_0, Γ_1, ...``."""
    if not ball:
        return []
    levels: list[list[int]] = [[] for _ in range(max(ball.values()) + 1)]
    for v, d in ball.items():
        levels[d].append(v)
    return [sorted(level) for level in levels]


def degree_ordering(graph: Graph) -> np.ndarray:
    """Vertices by decreasing in+out degree; ties by ascending id."""
    total = graph.out_degree + graph.in_degree
    return np.lexsort((np.arange(graph.n), -total)).astype(np.int64)


def edge_boundary_count(graph: Graph, source: int, level: int, direction: str = FORWARD) -> int:
    """Number of edges leaving the ball of radius ``level`` around ``source``.

    For directed graphs ``forward`` counts out-edges and ``backward`` in-edges
    crossing from the ball to its complement.
    """
    if level < 0:
        raise ValueError("level must be non-negative")
    _check_vertex(graph, source)
    indptr, indices = graph.csr(direction)
    return int(_edge_boundary_kernel(indptr, indices, source, min(level, graph.n), graph.n))
