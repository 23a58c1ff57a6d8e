"""Pruned landmark labeling and approximate pruning with local balls."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Union

import numba
import numpy as np

from .graph import BACKWARD, FORWARD, Graph, degree_ordering
from .labels import LandmarkLabels

EXHAUSTED = -1
"""Radius sentinel: the ball swallowed the whole reachable set of its root."""

_INF = 1 << 40


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class Fixed:
    radius: int

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("fixed radius must be non-negative")


@dataclass(frozen=True)
class EdgeBoundary:
    """Radius is set once enough edges leave the ball.

    With ``shift=1`` the radius is the smallest ``l`` whose ball of radius
    ``l - 1`` has at least ``threshold`` outgoing edges; ``shift=0`` tests the
    ball of radius ``l`` itself.
    """

    threshold: float
    shift: int = 1

    def __post_init__(self):
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")
        if self.shift not in (0, 1):
            raise ValueError("shift must be 0 or 1")


@dataclass(frozen=True)
class BallVolume:
    """Radius is the smallest ``l`` whose ball holds at least ``target`` vertices."""

    target: int

    def __post_init__(self):
        if not self.target > 0:
            raise ValueError("target must be positive")


RadiusRule = Union[Fixed, EdgeBoundary, BallVolume]

ALGORITHMS = ("pruned", "approx", "tz", "das-sarma")


@dataclass
class BuildConfig:
    """Algorithm selection plus every parameter any builder needs.

    ``ordering`` is ``"degree"`` or an explicit permutation of the vertices.
    ``selection``, ``repetitions`` and ``seed`` are only read by the baselines.
    """

    algorithm: str = "approx"
    ordering: Union[str, list, np.ndarray] = "degree"
    global_landmarks: int = 0
    radius_rule: RadiusRule = field(default_factory=lambda: Fixed(2))
    selection: str = "degree"
    repetitions: int = 5
    seed: int | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.global_landmarks < 0:
            raise ValueError("global_landmarks must be non-negative")

    def to_dict(self) -> dict:
        rule = self.radius_rule
        ordering = self.ordering if isinstance(self.ordering, str) else "explicit"
        return {
            "algorithm": self.algorithm,
            "ordering": ordering,
            "global_landmarks": self.global_landmarks,
            "radius_rule": type(rule).__name__,
            **{f"radius_{k}": v for k, v in asdict(rule).items()},
            "selection": self.selection,
            "repetitions": self.repetitions,
            "seed": self.seed,
        }


def resolve_ordering(graph: Graph, ordering) -> np.ndarray:
    if isinstance(ordering, str):
        if ordering != "degree":
            raise ValueError(f"unknown ordering {ordering!r}")
        return degree_ordering(graph)
    perm = np.asarray(ordering, dtype=np.int64)
    if perm.shape != (graph.n,) or not np.array_equal(np.sort(perm), np.arange(graph.n)):
        raise ValueError("ordering must be a permutation of the vertex ids")
    return perm


# ---------------------------------------------------------------------------
# kernels


@numba.njit(cache=True)
def _append(hubs, dists, lens, v, hub, d):
    k = lens[v]
    if k == len(hubs[v]):
        nh = np.empty(2 * k + 2, dtype=np.int32)
        nd = np.empty(2 * k + 2, dtype=np.int64)
        nh[:k] = hubs[v][:k]
        nd[:k] = dists[v][:k]
        hubs[v] = nh
        dists[v] = nd
    hubs[v][k] = hub
    dists[v][k] = d
    lens[v] = k + 1


@numba.njit(cache=True)
def _pruned_bfs(root, ptr, idx, r_hub, r_dist, r_len, t_hub, t_dist, t_len, tmp, dist, done, queue):
    # r_*: root-side label (loaded into tmp); t_*: label that receives ``root``.
    # snapshot: the root's own arrays may be reallocated when it labels itself
    rh = r_hub[root]
    rd = r_dist[root]
    nr = r_len[root]
    for k in range(nr):
        tmp[rh[k]] = rd[k]
    queue[0] = root
    dist[root] = 0
    head, tail = 0, 1
    while head < tail:
        u = queue[head]
        head += 1
        level = dist[u]
        uh = t_hub[u]
        ud = t_dist[u]
        pruned = False
        for k in range(t_len[u]):
            if tmp[uh[k]] + ud[k] <= level:
                pruned = True
                break
        if pruned:
            continue
        _append(t_hub, t_dist, t_len, u, root, level)
        for k in range(ptr[u], ptr[u + 1]):
            y = idx[k]
            if dist[y] < 0 and not done[y]:
                dist[y] = level + 1
                queue[tail] = y
                tail += 1
    for k in range(tail):
        dist[queue[k]] = -1
    for k in range(nr):
        tmp[rh[k]] = _INF


@numba.njit(cache=True)
def _flatten(hubs, dists, lens):
    total = 0
    for v in range(len(lens)):
        total += lens[v]
    owners = np.empty(total, dtype=np.int64)
    oh = np.empty(total, dtype=np.int64)
    od = np.empty(total, dtype=np.int64)
    p = 0
    for v in range(len(lens)):
        for k in range(lens[v]):
            owners[p] = v
            oh[p] = hubs[v][k]
            od[p] = dists[v][k]
            p += 1
    return owners, oh, od


@numba.njit(cache=True)
def _pruned_kernel(o_ptr, o_idx, i_ptr, i_idx, roots, directed):
    n = len(o_ptr) - 1
    f_hub = [np.empty(0, dtype=np.int32) for _ in range(n)]
    f_dist = [np.empty(0, dtype=np.int64) for _ in range(n)]
    f_len = np.zeros(n, dtype=np.int64)
    b_hub = [np.empty(0, dtype=np.int32) for _ in range(n if directed else 0)]
    b_dist = [np.empty(0, dtype=np.int64) for _ in range(n if directed else 0)]
    b_len = np.zeros(n if directed else 0, dtype=np.int64)
    tmp = np.full(n, _INF, dtype=np.int64)
    dist = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    queue = np.empty(max(n, 1), dtype=np.int32)
    for r in roots:
        if directed:
            # forward BFS: certifies dist(r, u), stored in L_B(u)
            _pruned_bfs(r, o_ptr, o_idx, f_hub, f_dist, f_len, b_hub, b_dist, b_len, tmp, dist, done, queue)
            _pruned_bfs(r, i_ptr, i_idx, b_hub, b_dist, b_len, f_hub, f_dist, f_len, tmp, dist, done, queue)
        else:
            _pruned_bfs(r, o_ptr, o_idx, f_hub, f_dist, f_len, f_hub, f_dist, f_len, tmp, dist, done, queue)
        done[r] = True
    fo, fh, fd = _flatten(f_hub, f_dist, f_len)
    if directed:
        bo, bh, bd = _flatten(b_hub, b_dist, b_len)
    else:
        bo, bh, bd = fo, fh, fd
    return fo, fh, fd, bo, bh, bd


@numba.njit(cache=True)
def _local_ball_kernel(ptr, idx, deg, vertices, radii, n):
    cap = max(16, 4 * len(vertices))
    out = np.empty((3, cap), dtype=np.int64)
    p = 0
    dist = np.full(n, -1, dtype=np.int64)
    admit = np.zeros(n, dtype=np.bool_)
    queue = np.empty(max(n, 1), dtype=np.int32)
    for j in range(len(vertices)):
        v = vertices[j]
        r = radii[j]
        queue[0] = v
        dist[v] = 0
        head, tail = 0, 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            if r >= 0 and du >= r:
                continue
            for k in range(ptr[u], ptr[u + 1]):
                y = idx[k]
                if dist[y] < 0:
                    dist[y] = du + 1
                    queue[tail] = y
                    tail += 1
                # boundary rule: y at radius r enters if some predecessor has degree <= deg(y)
                if du == r - 1 and dist[y] == r and deg[u] <= deg[y]:
                    admit[y] = True
        for k in range(tail):
            y = queue[k]
            if r <= 0 or dist[y] < r or admit[y]:
                if p == cap:
                    grown = np.empty((3, 2 * cap), dtype=np.int64)
                    grown[:, :cap] = out
                    out = grown
                    cap *= 2
                out[0, p] = v
                out[1, p] = y
                out[2, p] = dist[y]
                p += 1
            dist[y] = -1
            admit[y] = False
    return out[0, :p].copy(), out[1, :p].copy(), out[2, :p].copy()


@numba.njit(cache=True)
def _radius_kernel(ptr, idx, vertices, mode, threshold, shift, n):
    # mode 0: edge boundary, mode 1: ball volume
    radii = np.empty(len(vertices), dtype=np.int64)
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(max(n, 1), dtype=np.int32)
    for j in range(len(vertices)):
        v = vertices[j]
        queue[0] = v
        dist[v] = 0
        head, tail = 0, 1
        level = 0
        result = EXHAUSTED
        while True:
            level_end = tail
            if mode == 1 and tail >= threshold:
                result = level
                break
            crossing = 0
            while head < level_end:
                u = queue[head]
                head += 1
                for k in range(ptr[u], ptr[u + 1]):
                    y = idx[k]
                    if dist[y] < 0:
                        dist[y] = level + 1
                        queue[tail] = y
                        tail += 1
                    if dist[y] == level + 1:
                        crossing += 1
            if mode == 0 and crossing >= threshold:
                result = level + shift
                break
            if tail == level_end:
                break
            level += 1
        for k in range(tail):
            dist[queue[k]] = -1
        radii[j] = result
    return radii


# ---------------------------------------------------------------------------
# public operations


def _labels_from_kernel(graph: Graph, fo, fh, fd, bo, bh, bd) -> LandmarkLabels:
    return LandmarkLabels.from_entries(graph.n, graph.directed, (fo, fh, fd), (bo, bh, bd))


def build_pruned(graph: Graph, ordering="degree") -> LandmarkLabels:
    """Exact 2-hop cover by pruned BFS from every vertex in ``ordering``."""
    order = resolve_ordering(graph, ordering)
    raw = _pruned_kernel(
        graph.out_indptr, graph.out_indices, graph.in_indptr, graph.in_indices, order, graph.directed
    )
    return _labels_from_kernel(graph, *raw)


def compute_radii(graph: Graph, vertices, rule: RadiusRule, direction: str = FORWARD) -> np.ndarray:
    """Per-vertex ball radius under ``rule``; :data:`EXHAUSTED` when the ball covers everything reachable."""
    vertices = np.asarray(vertices, dtype=np.int64)
    if isinstance(rule, Fixed):
        return np.full(len(vertices), rule.radius, dtype=np.int64)
    indptr, indices = graph.csr(direction)
    if isinstance(rule, EdgeBoundary):
        return _radius_kernel(indptr, indices, vertices, 0, float(rule.threshold), rule.shift, graph.n)
    if isinstance(rule, BallVolume):
        return _radius_kernel(indptr, indices, vertices, 1, float(rule.target), 0, graph.n)
    raise TypeError(f"unknown radius rule {rule!r}")


def radius_from_edge_boundary(graph: Graph, x: int, threshold: float, direction: str = FORWARD, shift: int = 1) -> int:
    """Smallest ``l >= shift`` whose ball of radius ``l - shift`` has ``threshold`` leaving edges."""
    return int(compute_radii(graph, [x], EdgeBoundary(threshold, shift), direction)[0])


def radius_from_ball_volume(graph: Graph, x: int, target: int, direction: str = FORWARD) -> int:
    """Smallest ``l`` with at least ``target`` vertices within ``l`` hops of ``x``."""
    return int(compute_radii(graph, [x], BallVolume(target), direction)[0])


def local_balls(graph: Graph, vertices, radii, direction: str = FORWARD):
    """Raw ``(owner, member, dist)`` triples of the truncated local balls.

    Members at distance below the radius always enter; members at exactly the
    radius enter only when reached from a predecessor of no larger degree in
    the traversal direction.  A radius of :data:`EXHAUSTED` takes the whole
    reachable set; radius 0 keeps only the root.
    """
    indptr, indices = graph.csr(direction)
    deg = graph.degree(direction).astype(np.int64)
    return _local_ball_kernel(
        indptr, indices, deg, np.asarray(vertices, dtype=np.int64), np.asarray(radii, dtype=np.int64), graph.n
    )


def build_approx(graph: Graph, config: BuildConfig) -> LandmarkLabels:
    """Pruned BFS from the first ``H`` ordered vertices, local balls for the rest."""
    H = config.global_landmarks
    if H > graph.n:
        raise ValueError(f"global_landmarks={H} exceeds n={graph.n}")
    order = resolve_ordering(graph, config.ordering)
    raw = _pruned_kernel(
        graph.out_indptr, graph.out_indices, graph.in_indptr, graph.in_indices, order[:H], graph.directed
    )
    fo, fh, fd, bo, bh, bd = raw
    rest = order[H:]
    parts_f = [(fo, fh, fd)]
    parts_b = [(bo, bh, bd)]
    directions = [(FORWARD, parts_f)] + ([(BACKWARD, parts_b)] if graph.directed else [])
    for direction, parts in directions:
        radii = compute_radii(graph, rest, config.radius_rule, direction)
        parts.append(local_balls(graph, rest, radii, direction))

    def cat(parts):
        return tuple(np.concatenate([p[i] for p in parts]) for i in range(3))

    return LandmarkLabels.from_entries(graph.n, graph.directed, cat(parts_f), cat(parts_b))


@dataclass(frozen=True)
class TheoreticalParams:
    """Degree cutoff, global landmark count and boundary threshold from the power-law analysis."""

    K: float
    H: int
    delta: float
    boundary_threshold: float
    shift: int

    def radius_rule(self) -> EdgeBoundary:
        return EdgeBoundary(self.boundary_threshold, self.shift)


def degree_cutoff(n: int, beta: float) -> float:
    if beta >= 2.5:
        return math.sqrt(n)
    return n ** (1.0 / ((4.0 - beta) * (beta - 1.0)))


def theoretical_params(graph: Graph, beta: float, nu: float) -> TheoreticalParams:
    """Parameters for a random power-law graph with exponent ``beta`` and mean degree ``nu``.

    For ``2 < beta <= 3`` global landmarks are the vertices of degree at least
    ``K`` and balls grow until the ball one level in has
    ``4 nu ln(n)^2 n^((beta-2)/(beta-1))`` leaving edges.  For ``beta > 3``
    there are no global landmarks and the ball itself needs
    ``5 sqrt(nu ln n) sqrt(n)`` leaving edges.  Logarithms are natural.
    """
    if beta <= 2:
        raise ValueError("beta must exceed 2")
    n = graph.n
    ln = math.log(n)
    if beta > 3:
        delta = 5.0 * math.sqrt(nu * ln)
        return TheoreticalParams(math.inf, 0, delta, delta * math.sqrt(n), 0)
    K = degree_cutoff(n, beta)
    deg = graph.out_degree if not graph.directed else graph.out_degree + graph.in_degree
    H = int(np.count_nonzero(deg >= K))
    delta = 4.0 * nu * ln**2
    return TheoreticalParams(K, H, delta, delta * n ** ((beta - 2.0) / (beta - 1.0)), 1)


def build(graph: Graph, config: BuildConfig) -> LandmarkLabels:
    """Dispatch to the builder named by ``config.algorithm``."""
    from . import baselines

    if config.algorithm == "pruned":
        return build_pruned(graph, config.ordering)
    if config.algorithm == "approx":
        return build_approx(graph, config)
    if config.algorithm == "tz":
        return baselines.build_tz(
            graph, baselines.TZConfig(config.global_landmarks or None, config.selection, config.seed)
        )
    return baselines.build_das_sarma(graph, baselines.DasSarmaConfig(config.repetitions, config.seed))
