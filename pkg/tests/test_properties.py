"""Randomized invariants on small graphs."""

import math

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from landmark_sketch import (
    BACKWARD,
    FORWARD,
    UNREACHABLE,
    BuildConfig,
    DasSarmaConfig,
    EdgeBoundary,
    Fixed,
    Graph,
    TZConfig,
    bfs,
    bounded_bfs,
    build_approx,
    build_das_sarma,
    build_pruned,
    build_tz,
    degree_ordering,
    deserialize_labels,
    edge_boundary_count,
    query_distances,
    serialize_labels,
)

from conftest import all_pairs

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def graphs(draw, max_n=12, directed=None):
    n = draw(st.integers(1, max_n))
    if directed is None:
        directed = draw(st.booleans())
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=3 * n))
    return Graph.from_edges(n, np.array(edges, dtype=np.int64).reshape(-1, 2), directed)


def truth_matrix(g):
    return np.array(all_pairs(g), dtype=np.int64).reshape(g.n, g.n)


def all_queries(labels, n):
    xs, ys = np.divmod(np.arange(n * n), n)
    return query_distances(labels, xs, ys).reshape(n, n)


@given(graphs())
def test_graph_invariants(g):
    for u in range(g.n):
        out = g.out_neighbors(u).tolist()
        assert out == sorted(set(out)) and u not in out
        for v in out:
            assert u in g.in_neighbors(v).tolist()
            if not g.directed:
                assert u in g.out_neighbors(v).tolist()


@given(graphs(directed=False))
def test_undirected_bfs_symmetric(g):
    for s in range(g.n):
        assert np.array_equal(bfs(g, s, FORWARD), bfs(g, s, BACKWARD))


@given(graphs())
def test_bounded_bfs_full_radius_is_finite_bfs(g):
    for s in range(g.n):
        d = bfs(g, s)
        assert bounded_bfs(g, s, max(g.n - 1, 0)) == {v: int(x) for v, x in enumerate(d) if x != UNREACHABLE}


@given(graphs(), st.integers(0, 4))
def test_edge_boundary_exhaustive(g, level):
    for s in range(g.n):
        for direction, backward in ((FORWARD, False), (BACKWARD, True)):
            d = bfs(g, s, direction)
            inside = d <= level
            count = 0
            for u, v in g.edges().tolist():
                if backward:
                    u, v = v, u
                if g.directed:
                    count += inside[u] and not inside[v]
                else:
                    count += inside[u] != inside[v]
            assert edge_boundary_count(g, s, level, direction) == count


@given(graphs(), st.randoms(use_true_random=False))
def test_degree_ordering_permutation_and_edge_order_invariant(g, rnd):
    order = degree_ordering(g)
    assert sorted(order.tolist()) == list(range(g.n))
    edges = g.edges().tolist()
    rnd.shuffle(edges)
    again = Graph.from_edges(g.n, np.array(edges, dtype=np.int64).reshape(-1, 2), g.directed)
    assert np.array_equal(degree_ordering(again), order)


@given(graphs(), st.randoms(use_true_random=False))
def test_pruned_exact_under_any_ordering(g, rnd):
    order = list(range(g.n))
    rnd.shuffle(order)
    assert np.array_equal(all_queries(build_pruned(g, order), g.n), truth_matrix(g))


@given(graphs())
def test_approx_all_global_equals_pruned(g):
    assert build_approx(g, BuildConfig(global_landmarks=g.n, radius_rule=Fixed(1))) == build_pruned(g)


def _builders(g):
    yield build_pruned(g)
    yield build_approx(g, BuildConfig(global_landmarks=min(2, g.n), radius_rule=Fixed(1)))
    yield build_approx(g, BuildConfig(global_landmarks=0, radius_rule=Fixed(0)))
    yield build_approx(g, BuildConfig(global_landmarks=1, radius_rule=EdgeBoundary(3.0)))
    yield build_tz(g, TZConfig(H=max(1, g.n // 3)))
    yield build_das_sarma(g, DasSarmaConfig(2, seed=g.n))


@given(graphs())
def test_every_builder_is_sound(g):
    truth = truth_matrix(g)
    for labels in _builders(g):
        est = all_queries(labels, g.n)
        assert np.all(est >= truth)
        assert np.all(est[truth == UNREACHABLE] == UNREACHABLE)
        for u in range(g.n):
            for h, d in labels.forward_map(u).items():
                assert truth[u, h] == d
            for h, d in labels.backward_map(u).items():
                assert truth[h, u] == d


@given(graphs(directed=False), st.integers(1, 4))
def test_tz_three_stretch(g, H):
    est = all_queries(build_tz(g, TZConfig(H=H)), g.n)
    truth = truth_matrix(g)
    ok = truth != UNREACHABLE
    assert np.all(est[ok] <= 3 * truth[ok])


@given(graphs(), st.integers(1, 4))
def test_das_sarma_entry_bound(g, r):
    lab = build_das_sarma(g, DasSarmaConfig(r, seed=3))
    # r seed sets per level plus the self entry
    assert lab.forward.sizes().max() <= r * (math.floor(math.log2(g.n)) + 1) + 1


@given(graphs())
def test_serialization_round_trip(g):
    for labels in _builders(g):
        data = serialize_labels(labels)
        assert deserialize_labels(data) == labels
        assert serialize_labels(deserialize_labels(data)) == data


@given(graphs(), st.randoms(use_true_random=False))
def test_pruned_hubs_precede_owners(g, rnd):
    # processed roots are never revisited, so a hub always ranks no later than its owner
    order = list(range(g.n))
    rnd.shuffle(order)
    rank = {v: i for i, v in enumerate(order)}
    lab = build_pruned(g, order)
    for u in range(g.n):
        for h in list(lab.forward_map(u)) + list(lab.backward_map(u)):
            assert rank[h] <= rank[u]
