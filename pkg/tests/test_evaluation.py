import csv
import io
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from landmark_sketch import (
    UNREACHABLE,
    BuildConfig,
    DasSarmaConfig,
    EvalReport,
    Fixed,
    Graph,
    LandmarkLabels,
    QueryPairs,
    SoundnessError,
    bfs,
    build_approx,
    build_das_sarma,
    build_pruned,
    evaluate,
    query_lookup_count,
    sample_pairs,
    verify_two_hop_cover,
)
from landmark_sketch import evaluation

from conftest import er_graph, path_graph


def strip_vertex(labels: LandmarkLabels, v: int) -> LandmarkLabels:
    def triples(ls):
        owners = ls.owners()
        keep = owners != v
        return owners[keep], ls.hubs[keep].astype(np.int64), ls.dists[keep].astype(np.int64)

    return LandmarkLabels.from_entries(labels.n, labels.directed, triples(labels.forward), triples(labels.backward))


def test_sample_pairs_k2():
    g = Graph.from_edges(2, [(0, 1)])
    pairs = sample_pairs(g, 1, seed=0)
    assert len(pairs) == 1
    (s, t, d), = list(pairs)
    assert {s, t} == {0, 1} and d == 1


def test_sample_pairs_may_be_unreachable():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    pairs = sample_pairs(g, 200, seed=1)
    assert np.any(pairs.true_distances == UNREACHABLE)
    assert np.all(pairs.sources != pairs.targets)


def test_sample_pairs_deterministic_and_validated():
    g = er_graph(100, 1)
    a, b = sample_pairs(g, 50, seed=3), sample_pairs(g, 50, seed=3)
    assert np.array_equal(a.sources, b.sources) and np.array_equal(a.targets, b.targets)
    with pytest.raises(ValueError):
        sample_pairs(g, 0, seed=3)


def test_pair_distance_histogram_matches_census():
    g = er_graph(2048, 0)
    census = np.zeros(64)
    for s in range(g.n):
        d = bfs(g, s)
        d = d[(d != UNREACHABLE)]
        census += np.bincount(d, minlength=64)[:64]
    census[0] -= g.n  # drop s == t
    total_pairs = g.n * (g.n - 1)
    unreachable = total_pairs - census.sum()
    samples = 10**5
    pairs = sample_pairs(g, samples, seed=11)
    t = pairs.true_distances
    observed = np.bincount(t[t != UNREACHABLE], minlength=64)[:64]
    for k in range(64):
        p = census[k] / total_pairs
        assert abs(observed[k] - samples * p) <= 3 * math.sqrt(samples * p * (1 - p)) + 1e-9
    p = unreachable / total_pairs
    assert abs(np.sum(t == UNREACHABLE) - samples * p) <= 3 * math.sqrt(samples * p * (1 - p)) + 1e-9


def test_exact_labels_report_zero_stretch():
    g = er_graph(300, 2)
    report = evaluate(build_pruned(g), g, sample_pairs(g, 2000, seed=0))
    assert report.relative_average_stretch == 0 and report.average_additive_stretch == 0
    assert report.max_additive_stretch == 0 and report.median_additive_stretch == 0
    assert report.max_relative_stretch == "1" and report.false_disconnects == 0
    assert report.pairs == 2000


def test_fault_injection_counts_false_disconnects(p4):
    lab = strip_vertex(build_pruned(p4), 0)
    pairs = sample_pairs(p4, 500, seed=4)
    report = evaluate(lab, p4, pairs)
    involving = int(np.sum((pairs.sources == 0) | (pairs.targets == 0)))
    assert report.false_disconnects == involving > 0


def test_stretch_statistics_by_hand():
    # P5 with a single hub at 2 and self entries: d(0,1) estimated 0->2->1 = 3
    g = path_graph(5)
    owners = [0, 1, 2, 3, 4, 0, 1, 3, 4]
    hubs = [0, 1, 2, 3, 4, 2, 2, 2, 2]
    dists = [0, 0, 0, 0, 0, 2, 1, 1, 2]
    lab = LandmarkLabels.from_entries(5, False, (np.array(owners), np.array(hubs), np.array(dists)))
    pairs = QueryPairs(np.array([0, 0, 3, 1]), np.array([1, 4, 4, 3]), np.array([1, 4, 1, 2]))
    r = evaluate(lab, g, pairs)
    # estimates 3, 4, 3, 2 against truths 1, 4, 1, 2
    assert r.average_additive_stretch == pytest.approx(1.0)
    assert r.max_additive_stretch == 2
    assert r.median_additive_stretch == 0
    assert r.relative_average_stretch == pytest.approx((2 + 0 + 2 + 0) / 4)
    assert Fraction(r.max_relative_stretch) == 3
    assert r.average_distance == pytest.approx(2.0)


def test_max_relative_stretch_is_rational():
    g = path_graph(12)
    owners = list(range(12)) + [0, 10]
    hubs = list(range(12)) + [11, 11]
    dists = [0] * 12 + [11, 1]
    lab = LandmarkLabels.from_entries(12, False, (np.array(owners), np.array(hubs), np.array(dists)))
    pairs = QueryPairs(np.array([0]), np.array([10]), np.array([10]))
    assert evaluate(lab, g, pairs).max_relative_stretch == "6/5"


def test_underestimate_raises(p4):
    lab = LandmarkLabels.from_entries(4, False, (np.array([0, 3]), np.array([0, 0]), np.array([0, 1])))
    with pytest.raises(SoundnessError):
        evaluate(lab, p4, QueryPairs(np.array([0]), np.array([3]), np.array([3])))


def test_invented_path_raises():
    g = Graph.from_edges(2, [])
    lab = LandmarkLabels.from_entries(2, False, (np.array([0, 1]), np.array([0, 0]), np.array([0, 1])))
    with pytest.raises(SoundnessError):
        evaluate(lab, g, sample_pairs(g, 5, seed=0))


def test_rejects_out_of_range_pairs(p4):
    with pytest.raises(ValueError):
        evaluate(build_pruned(p4), p4, QueryPairs(np.array([0]), np.array([9]), np.array([1])))


def test_lookup_total_matches_average():
    g = er_graph(400, 7)
    lab = build_approx(g, BuildConfig(global_landmarks=10, radius_rule=Fixed(2)))
    pairs = sample_pairs(g, 2000, seed=5)
    total = sum(query_lookup_count(lab, s, t) for s, t, _ in pairs)
    assert evaluate(lab, g, pairs).avg_lookup_count * 2000 == pytest.approx(total)


def test_report_pure_and_serializable():
    g = er_graph(300, 3)
    lab = build_das_sarma(g, DasSarmaConfig(2, seed=1))
    pairs = sample_pairs(g, 1000, seed=2)
    a = evaluate(lab, g, pairs, config={"algorithm": "das-sarma"})
    b = evaluate(lab, g, pairs, config={"algorithm": "das-sarma"})
    assert a == b
    flat = json.loads(a.to_json())
    assert flat["config_algorithm"] == "das-sarma"
    rows = list(csv.reader(io.StringIO(a.to_csv())))
    assert rows[0][: len(EvalReport.COLUMNS)] == list(EvalReport.COLUMNS)
    assert rows[0][-1] == "config_algorithm" and len(rows) == 2


def test_cover_check_examples(p4):
    assert verify_two_hop_cover(build_pruned(p4), p4).holds
    check = verify_two_hop_cover(build_approx(p4, BuildConfig(global_landmarks=0, radius_rule=Fixed(0))), p4)
    assert not check.holds
    x, y, est, dist = check.first_violation
    assert est != dist


@pytest.mark.parametrize("seed", range(4))
def test_cover_bitset_and_scan_paths_agree(seed, monkeypatch):
    g = er_graph(200, seed)
    for radius in (1, 2, 3):
        lab = build_approx(g, BuildConfig(global_landmarks=0, radius_rule=Fixed(radius)))
        fast = verify_two_hop_cover(lab, g)
        monkeypatch.setattr(evaluation, "_BITSET_BUDGET", 0)
        slow = verify_two_hop_cover(lab, g)
        monkeypatch.undo()
        assert fast.holds == slow.holds
        if not fast.holds:
            assert fast.first_violation == slow.first_violation


def test_cover_detects_overestimated_entry(p4):
    # a stored distance that is too large makes some query inexact
    lab = build_pruned(p4)
    f = lab.forward
    dists = f.dists.astype(np.int64).copy()
    dists[np.flatnonzero(f.dists > 0)[0]] += 1
    bad = LandmarkLabels.from_entries(4, False, (f.owners(), f.hubs.astype(np.int64), dists))
    assert not verify_two_hop_cover(bad, p4).holds
