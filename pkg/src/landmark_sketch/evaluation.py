"""Ground truth, query sampling and the stretch / size / query-cost report."""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numba
import numpy as np

from ._random import make_rng
from .graph import UNREACHABLE, Graph, _bfs_kernel
from .labels import LandmarkLabels, query_distances, query_lookup_counts

_PAIR_STREAM = 3


class SoundnessError(AssertionError):
    """A label query underestimated a distance or invented a path."""


@dataclass(frozen=True)
class QueryPairs:
    """Sampled ``(source, target)`` pairs with their exact distances."""

    sources: np.ndarray
    targets: np.ndarray
    true_distances: np.ndarray

    def __len__(self) -> int:
        return len(self.sources)

    def __iter__(self):
        return zip(self.sources.tolist(), self.targets.tolist(), self.true_distances.tolist())


def true_distances(graph: Graph, sources, targets) -> np.ndarray:
    """Exact distances with one forward BFS per distinct source."""
    sources = np.asarray(sources, dtype=np.int64)
    targets = np.asarray(targets, dtype=np.int64)
    out = np.empty(len(sources), dtype=np.int64)
    for s in np.unique(sources):
        mask = sources == s
        dist = _bfs_kernel(graph.out_indptr, graph.out_indices, int(s), graph.n)
        out[mask] = dist[targets[mask]]
    return out


def sample_pairs(graph: Graph, count: int, seed: int) -> QueryPairs:
    """Uniform pairs with replacement, ``source != target``."""
    if count < 1:
        raise ValueError("count must be at least 1")
    if graph.n < 2:
        raise ValueError("need at least two vertices to sample distinct pairs")
    rng = make_rng(seed, _PAIR_STREAM)
    src = rng.integers(0, graph.n, size=count)
    # uniform over targets != source
    dst = rng.integers(0, graph.n - 1, size=count)
    dst = dst + (dst >= src)
    return QueryPairs(src.astype(np.int64), dst.astype(np.int64), true_distances(graph, src, dst))


@dataclass
class EvalReport:
    """Metrics over a pair sample.

    Stretch statistics cover pairs that are reachable and were not reported
    disconnected.  ``relative_average_stretch`` averages ``(est - dist) / dist``;
    ``max_relative_stretch`` is the largest ``est / dist`` as an exact fraction.
    """

    pairs: int
    reachable_pairs: int
    relative_average_stretch: float
    max_relative_stretch: str
    average_additive_stretch: float
    max_additive_stretch: int
    median_additive_stretch: int
    average_distance: float
    false_disconnects: int
    avg_landmarks_per_vertex: float
    max_landmarks_per_vertex: int
    total_landmarks: int
    avg_lookup_count: float
    build_wall_time: float | None = None
    config: dict = field(default_factory=dict)

    COLUMNS = (
        "pairs",
        "reachable_pairs",
        "relative_average_stretch",
        "max_relative_stretch",
        "average_additive_stretch",
        "max_additive_stretch",
        "median_additive_stretch",
        "average_distance",
        "false_disconnects",
        "avg_landmarks_per_vertex",
        "max_landmarks_per_vertex",
        "total_landmarks",
        "avg_lookup_count",
        "build_wall_time",
    )

    def to_flat_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "config"}
        d.update({f"config_{k}": v for k, v in sorted(self.config.items())})
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_flat_dict(), indent=2, sort_keys=False)

    def csv_columns(self) -> list[str]:
        return list(self.COLUMNS) + [f"config_{k}" for k in sorted(self.config)]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=self.csv_columns(), lineterminator="\n")
        if header:
            writer.writeheader()
        writer.writerow(self.to_flat_dict())
        return buf.getvalue()


def evaluate(
    labels: LandmarkLabels,
    graph: Graph,
    pairs: QueryPairs,
    build_wall_time: float | None = None,
    config: dict | None = None,
) -> EvalReport:
    """Score ``labels`` on ``pairs``; raises :class:`SoundnessError` on an underestimate."""
    if labels.n != graph.n:
        raise ValueError("labels and graph disagree on n")
    src, dst, truth = pairs.sources, pairs.targets, pairs.true_distances
    if len(src) and max(src.max(), dst.max()) >= graph.n:
        raise ValueError("pair vertex id exceeds n")
    est = query_distances(labels, src, dst)
    lookups = query_lookup_counts(labels, src, dst)

    reachable = truth != UNREACHABLE
    reported = est != UNREACHABLE
    if np.any(reported & ~reachable):
        raise SoundnessError("a truly unreachable pair was reported reachable")
    low = reachable & reported & (est < truth)
    if np.any(low):
        i = int(np.flatnonzero(low)[0])
        raise SoundnessError(f"pair ({src[i]}, {dst[i]}): estimate {est[i]} < distance {truth[i]}")

    false_disconnects = int(np.count_nonzero(reachable & ~reported))
    ok = reachable & reported & (truth > 0)
    e, t = est[ok], truth[ok]
    additive = (e - t).tolist()
    if additive:
        rel_avg = float(np.mean((e - t) / t))
        max_rel = max(Fraction(int(a), int(b)) for a, b in zip(e.tolist(), t.tolist()))
        avg_add = float(np.mean(e - t))
        max_add = int(max(additive))
        med_add = int(statistics.median_low(additive))
        avg_dist = float(np.mean(t))
    else:
        rel_avg, max_rel, avg_add, max_add, med_add, avg_dist = 0.0, Fraction(1), 0.0, 0, 0, 0.0

    sizes = labels.landmarks_per_vertex()
    return EvalReport(
        pairs=len(src),
        reachable_pairs=int(np.count_nonzero(reachable)),
        relative_average_stretch=rel_avg,
        max_relative_stretch=str(max_rel),
        average_additive_stretch=avg_add,
        max_additive_stretch=max_add,
        median_additive_stretch=med_add,
        average_distance=avg_dist,
        false_disconnects=false_disconnects,
        avg_landmarks_per_vertex=float(sizes.mean()) if labels.n else 0.0,
        max_landmarks_per_vertex=int(sizes.max()) if labels.n else 0,
        total_landmarks=int(sizes.sum()),
        avg_lookup_count=float(lookups.mean()) if len(lookups) else 0.0,
        build_wall_time=build_wall_time,
        config=dict(config or {}),
    )


@dataclass(frozen=True)
class CoverCheck:
    holds: bool
    first_violation: tuple[int, int, int, int] | None = None
    """``(x, y, estimate, distance)`` of the first failing ordered pair."""

    def __bool__(self) -> bool:
        return self.holds


@numba.njit(cache=True)
def _cover_scan_kernel(o_ptr, o_idx, f_ptr, f_hub, f_dist, b_ptr, b_hub, b_dist, n):
    # exact estimate per pair by scanning L_B(y) against a dense copy of L_F(x)
    tmp = np.full(n, np.int64(-1), dtype=np.int64)
    for x in range(n):
        truth = _bfs_kernel(o_ptr, o_idx, x, n)
        for k in range(f_ptr[x], f_ptr[x + 1]):
            tmp[f_hub[k]] = f_dist[k]
        for y in range(n):
            t = np.int64(truth[y])
            best = np.int64(0xFFFFFFFF)
            for k in range(b_ptr[y], b_ptr[y + 1]):
                a = tmp[b_hub[k]]
                if a >= 0:
                    d = a + np.int64(b_dist[k])
                    if d < best:
                        best = d
            if best != t:
                return x, y, best, t
        for k in range(f_ptr[x], f_ptr[x + 1]):
            tmp[f_hub[k]] = -1
    return -1, -1, -1, -1


@numba.njit(cache=True)
def _entries_not_below_truth(o_ptr, o_idx, f_ptr, f_hub, f_dist, bt_ptr, bt_owner, bt_dist, n):
    # forward entries checked from their owner, backward entries from their hub
    for x in range(n):
        truth = _bfs_kernel(o_ptr, o_idx, x, n)
        for k in range(f_ptr[x], f_ptr[x + 1]):
            if f_dist[k] < truth[f_hub[k]]:
                return False
        for k in range(bt_ptr[x], bt_ptr[x + 1]):
            if bt_dist[k] < truth[bt_owner[k]]:
                return False
    return True


@numba.njit(cache=True)
def _cover_bitset_kernel(o_ptr, o_idx, f_ptr, f_hub, f_dist, b_ptr, b_hub, b_dist, n, levels):
    # Caller guarantees no entry underestimates its distance, so the estimate
    # is never below the truth and a witness summing to the truth suffices.
    words = (n + 63) // 64
    bb = np.zeros((n, levels, words), dtype=np.uint64)
    for y in range(n):
        for k in range(b_ptr[y], b_ptr[y + 1]):
            z = b_hub[k]
            bb[y, b_dist[k], z >> 6] |= np.uint64(1) << np.uint64(z & 63)
    fa = np.zeros((levels, words), dtype=np.uint64)
    for x in range(n):
        truth = _bfs_kernel(o_ptr, o_idx, x, n)
        fa[:, :] = 0
        for k in range(f_ptr[x], f_ptr[x + 1]):
            z = f_hub[k]
            fa[f_dist[k], z >> 6] |= np.uint64(1) << np.uint64(z & 63)
        for y in range(n):
            t = np.int64(truth[y])
            if t == 0xFFFFFFFF:
                # a shared hub would imply a real path; entries were validated
                continue
            found = False
            lo = max(0, t - levels + 1)
            hi = min(t, levels - 1)
            for a in range(lo, hi + 1):
                s = t - a
                for w in range(words):
                    if fa[a, w] & bb[y, s, w]:
                        found = True
                        break
                if found:
                    break
            if not found:
                return x, y
    return -1, -1


_BITSET_BUDGET = 512 * 2**20


def verify_two_hop_cover(labels: LandmarkLabels, graph: Graph) -> CoverCheck:
    """All-pairs check that every query is exact, unreachability included.

    Runs one BFS per vertex; intended for graphs up to a few thousand vertices.
    """
    from .labels import query_distance

    f, b = labels.forward, labels.backward
    n = graph.n
    if n == 0:
        return CoverCheck(True)
    # backward entries regrouped by hub so each BFS can check them
    owners = b.owners()
    order = np.argsort(b.hubs, kind="stable")
    bt_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(b.hubs, minlength=n), out=bt_ptr[1:])
    sound = _entries_not_below_truth(
        graph.out_indptr, graph.out_indices, f.indptr, f.hubs, f.dists, bt_ptr, owners[order], b.dists[order], n
    )
    max_dist = int(max(f.dists.max(initial=0), b.dists.max(initial=0)))
    levels = max_dist + 1
    if sound and n * levels * ((n + 63) // 64) * 8 <= _BITSET_BUDGET:
        x, y = _cover_bitset_kernel(
            graph.out_indptr, graph.out_indices, f.indptr, f.hubs, f.dists, b.indptr, b.hubs, b.dists, n, levels
        )
        if x < 0:
            return CoverCheck(True)
        t = int(true_distances(graph, [x], [y])[0])
        return CoverCheck(False, (int(x), int(y), query_distance(labels, int(x), int(y)), t))
    x, y, est, t = _cover_scan_kernel(
        graph.out_indptr, graph.out_indices, f.indptr, f.hubs, f.dists, b.indptr, b.hubs, b.dists, n
    )
    if x < 0:
        return CoverCheck(True)
    return CoverCheck(False, (int(x), int(y), int(est), int(t)))
