"""Landmark label storage, the two-hop distance query and the label file format."""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numba
import numpy as np

from .graph import UNREACHABLE

MAGIC = b"LMKL"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIB")


class LabelFormatError(ValueError):
    """Raised when a label stream has a bad header or is truncated."""


@dataclass(frozen=True)
class LabelSet:
    """One direction of a labeling in CSR form, hubs sorted per vertex."""

    indptr: np.ndarray
    hubs: np.ndarray
    dists: np.ndarray

    @classmethod
    def from_entries(cls, n: int, owners: np.ndarray, hubs: np.ndarray, dists: np.ndarray) -> "LabelSet":
        """Canonicalize raw ``(owner, hub, dist)`` triples.

        Duplicate ``(owner, hub)`` entries keep the smallest distance.
        """
        owners = np.asarray(owners, dtype=np.int64)
        hubs = np.asarray(hubs, dtype=np.int64)
        dists = np.asarray(dists, dtype=np.int64)
        order = np.lexsort((dists, hubs, owners))
        owners, hubs, dists = owners[order], hubs[order], dists[order]
        if owners.size:
            keep = np.ones(owners.size, dtype=bool)
            keep[1:] = (owners[1:] != owners[:-1]) | (hubs[1:] != hubs[:-1])
            owners, hubs, dists = owners[keep], hubs[keep], dists[keep]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(owners, minlength=n), out=indptr[1:])
        return cls(indptr, hubs.astype(np.int32), dists.astype(np.uint32))

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    def sizes(self) -> np.ndarray:
        return np.diff(self.indptr)

    def hubs_of(self, v: int) -> np.ndarray:
        return self.hubs[self.indptr[v]:self.indptr[v + 1]]

    def dists_of(self, v: int) -> np.ndarray:
        return self.dists[self.indptr[v]:self.indptr[v + 1]]

    def as_dict(self, v: int) -> dict[int, int]:
        return dict(zip(self.hubs_of(v).tolist(), self.dists_of(v).tolist()))

    def owners(self) -> np.ndarray:
        return np.repeat(np.arange(self.n, dtype=np.int64), self.sizes())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabelSet):
            return NotImplemented
        return (
            np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.hubs, other.hubs)
            and np.array_equal(self.dists, other.dists)
        )


@dataclass(frozen=True, eq=False)
class LandmarkLabels:
    """Forward and backward landmark maps for every vertex.

    ``forward`` holds ``dist(x, hub)`` and ``backward`` holds ``dist(hub, x)``.
    Undirected labelings share one :class:`LabelSet` for both.
    """

    n: int
    directed: bool
    forward: LabelSet
    backward: LabelSet

    @classmethod
    def from_entries(cls, n, directed, fwd, bwd=None) -> "LandmarkLabels":
        """Build from ``(owners, hubs, dists)`` triples per direction."""
        f = LabelSet.from_entries(n, *fwd)
        if not directed:
            return cls(n, False, f, f)
        return cls(n, True, f, LabelSet.from_entries(n, *bwd))

    @classmethod
    def empty(cls, n: int = 0, directed: bool = False) -> "LandmarkLabels":
        z = np.empty(0, dtype=np.int64)
        return cls.from_entries(n, directed, (z, z, z), (z, z, z))

    def forward_map(self, v: int) -> dict[int, int]:
        return self.forward.as_dict(v)

    def backward_map(self, v: int) -> dict[int, int]:
        return self.backward.as_dict(v)

    def landmarks_per_vertex(self) -> np.ndarray:
        """Map entries per vertex; directed labelings count both directions."""
        if self.directed:
            return self.forward.sizes() + self.backward.sizes()
        return self.forward.sizes()

    @property
    def total_landmarks(self) -> int:
        return int(self.landmarks_per_vertex().sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LandmarkLabels):
            return NotImplemented
        return (
            self.n == other.n
            and self.directed == other.directed
            and self.forward == other.forward
            and self.backward == other.backward
        )


@numba.njit(cache=True)
def _contains(hubs, lo, hi, key):
    # binary search on a sorted slice
    while lo < hi:
        mid = (lo + hi) >> 1
        if hubs[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    return lo


@numba.njit(cache=True)
def _query_one(f_ptr, f_hub, f_dist, b_ptr, b_hub, b_dist, x, y):
    fa, fb = f_ptr[x], f_ptr[x + 1]
    ba, bb = b_ptr[y], b_ptr[y + 1]
    # iterate the smaller map, probe the larger
    if fb - fa <= bb - ba:
        small_hub, small_dist, s0, s1 = f_hub, f_dist, fa, fb
        big_hub, big_dist, g0, g1 = b_hub, b_dist, ba, bb
    else:
        small_hub, small_dist, s0, s1 = b_hub, b_dist, ba, bb
        big_hub, big_dist, g0, g1 = f_hub, f_dist, fa, fb
    best = np.int64(0xFFFFFFFF)
    for k in range(s0, s1):
        h = small_hub[k]
        j = _contains(big_hub, g0, g1, h)
        if j < g1 and big_hub[j] == h:
            d = np.int64(small_dist[k]) + np.int64(big_dist[j])
            if d < best:
                best = d
    return best


@numba.njit(cache=True)
def _query_many(f_ptr, f_hub, f_dist, b_ptr, b_hub, b_dist, xs, ys):
    out = np.empty(len(xs), dtype=np.int64)
    for i in range(len(xs)):
        out[i] = _query_one(f_ptr, f_hub, f_dist, b_ptr, b_hub, b_dist, xs[i], ys[i])
    return out


@numba.njit(cache=True)
def _lookups_many(f_ptr, f_hub, b_ptr, b_hub, xs, ys):
    out = np.empty(len(xs), dtype=np.int64)
    for i in range(len(xs)):
        x, y = xs[i], ys[i]
        fa, fb = f_ptr[x], f_ptr[x + 1]
        ba, bb = b_ptr[y], b_ptr[y + 1]
        j = _contains(f_hub, fa, fb, y)
        k = _contains(b_hub, ba, bb, x)
        if (j < fb and f_hub[j] == y) or (k < bb and b_hub[k] == x):
            out[i] = 1
        else:
            out[i] = min(fb - fa, bb - ba)
    return out


def _args(labels: LandmarkLabels):
    f, b = labels.forward, labels.backward
    return f.indptr, f.hubs, f.dists, b.indptr, b.hubs, b.dists


def query_distance(labels: LandmarkLabels, x: int, y: int) -> int:
    """Estimate ``dist(x, y)`` through the common landmarks of ``x`` and ``y``.

    Returns :data:`UNREACHABLE` when the forward map of ``x`` and the backward
    map of ``y`` share no landmark.
    """
    if not (0 <= x < labels.n and 0 <= y < labels.n):
        raise IndexError("vertex out of range")
    return int(_query_one(*_args(labels), x, y))


def query_distances(labels: LandmarkLabels, sources, targets) -> np.ndarray:
    """Vectorized :func:`query_distance`; returns int64 with UNREACHABLE sentinels."""
    xs = np.ascontiguousarray(sources, dtype=np.int64)
    ys = np.ascontiguousarray(targets, dtype=np.int64)
    if xs.size and (min(xs.min(), ys.min()) < 0 or max(xs.max(), ys.max()) >= labels.n):
        raise IndexError("vertex out of range")
    return _query_many(*_args(labels), xs, ys)


def query_lookup_count(labels: LandmarkLabels, x: int, y: int) -> int:
    """Hash-lookup cost of a query: 1 on a direct hit, else the smaller map size."""
    return int(query_lookup_counts(labels, [x], [y])[0])


def query_lookup_counts(labels: LandmarkLabels, sources, targets) -> np.ndarray:
    xs = np.ascontiguousarray(sources, dtype=np.int64)
    ys = np.ascontiguousarray(targets, dtype=np.int64)
    f, b = labels.forward, labels.backward
    return _lookups_many(f.indptr, f.hubs, b.indptr, b.hubs, xs, ys)


def _encode_block(ls: LabelSet) -> list[np.ndarray]:
    sizes = ls.sizes()
    pairs = np.empty((len(ls.hubs), 2), dtype="<u4")
    pairs[:, 0] = ls.hubs
    pairs[:, 1] = ls.dists
    return [sizes, pairs]


def serialize_labels(labels: LandmarkLabels) -> bytes:
    """Encode labels in the versioned little-endian label file format.

    Layout: magic, version, n, directed flag; then for each vertex the forward
    entry count followed by ``(hub, dist)`` uint32 pairs sorted by hub, then the
    backward count and pairs.
    """
    parts = [_HEADER.pack(MAGIC, FORMAT_VERSION, labels.n, int(labels.directed))]
    fs, fp = _encode_block(labels.forward)
    bs, bp = _encode_block(labels.backward)
    fptr, bptr = labels.forward.indptr, labels.backward.indptr
    for v in range(labels.n):
        parts.append(struct.pack("<I", fs[v]))
        parts.append(fp[fptr[v]:fptr[v + 1]].tobytes())
        parts.append(struct.pack("<I", bs[v]))
        parts.append(bp[bptr[v]:bptr[v + 1]].tobytes())
    return b"".join(parts)


def deserialize_labels(data: bytes) -> LandmarkLabels:
    """Inverse of :func:`serialize_labels`."""
    if len(data) < _HEADER.size:
        raise LabelFormatError("truncated header")
    magic, version, n, directed = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise LabelFormatError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise LabelFormatError(f"unsupported label format version {version}")
    buf = memoryview(data)
    pos = _HEADER.size
    chunks: list[list[np.ndarray]] = [[], []]
    sizes = np.zeros((2, n), dtype=np.int64)
    for v in range(n):
        for side in (0, 1):
            if pos + 4 > len(data):
                raise LabelFormatError("truncated stream")
            (count,) = struct.unpack_from("<I", buf, pos)
            pos += 4
            end = pos + 8 * count
            if end > len(data):
                raise LabelFormatError("truncated stream")
            chunks[side].append(np.frombuffer(buf[pos:end], dtype="<u4").reshape(-1, 2))
            sizes[side, v] = count
            pos = end
    if pos != len(data):
        raise LabelFormatError("trailing bytes after label data")

    def block(side: int) -> LabelSet:
        pairs = np.concatenate(chunks[side]) if n else np.empty((0, 2), dtype="<u4")
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(sizes[side], out=indptr[1:])
        return LabelSet(indptr, pairs[:, 0].astype(np.int32), pairs[:, 1].astype(np.uint32))

    f = block(0)
    if not directed:
        return LandmarkLabels(n, False, f, f)
    return LandmarkLabels(n, True, f, block(1))
