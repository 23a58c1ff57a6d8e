import math

import numpy as np
import pytest

from landmark_sketch import (
    WeightSequence,
    bfs,
    chung_lu_power_law,
    generate_chung_lu,
    generate_er,
    sample_power_law_weights,
    x_min_for_mean,
)
from landmark_sketch._random import make_rng
from landmark_sketch.generators import power_law_inverse_cdf

EDGE_STREAM = 2


def edge_set(g):
    return {tuple(e) for e in g.edges().tolist()}


def pareto_mean_by_integration(beta: float, x_min: float) -> float:
    # trapezoid rule for int x * Z x^-beta dx on a log grid, plus the analytic tail past the grid
    z = (beta - 1) * x_min ** (beta - 1)
    top = 1e9 * x_min
    x = np.geomspace(x_min, top, 400_001)
    body = np.trapezoid(z * x ** (1 - beta), x)
    tail = z * top ** (2 - beta) / (beta - 2)
    return float(body + tail)


def test_inverse_cdf_lower_endpoint():
    assert power_law_inverse_cdf(0.0, 2.5, 3.0) == 3.0


def test_weights_deterministic_and_bounded():
    a = sample_power_law_weights(1000, 2.5, 2.0, seed=3)
    b = sample_power_law_weights(1000, 2.5, 2.0, seed=3)
    assert np.array_equal(a.weights, b.weights)
    assert a.weights.min() >= 2.0
    assert abs(a.volume - a.weights.sum()) <= 1e-9 * a.n
    assert a.normalizer == pytest.approx(1.5 * 2.0**1.5)


@pytest.mark.parametrize("beta", [1.0, 0.5])
def test_weights_reject_small_beta(beta):
    with pytest.raises(ValueError):
        sample_power_law_weights(10, beta, 1.0, seed=0)


def test_pareto_mean_oracle_agrees_with_closed_form():
    for beta in (2.2, 2.5, 3.0, 3.5):
        assert pareto_mean_by_integration(beta, 1.0) == pytest.approx((beta - 1) / (beta - 2), rel=1e-4)


def test_power_law_sample_mean_beta3():
    w = sample_power_law_weights(10**6, 3.0, 1.0, seed=12)
    assert abs(w.weights.mean() / pareto_mean_by_integration(3.0, 1.0) - 1) < 0.02


def test_power_law_tail_fractions():
    w = sample_power_law_weights(10**6, 2.5, 1.0, seed=5).weights
    for t in (2, 4, 8):
        assert abs(np.mean(w > t) / t**-1.5 - 1) < 0.10


def test_x_min_for_mean_examples():
    assert x_min_for_mean(3, 2) == pytest.approx(1.0)
    assert x_min_for_mean(2.5, 3) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        x_min_for_mean(2.0, 3)


def test_x_min_for_mean_round_trip():
    x_min = x_min_for_mean(2.5, 10)
    w = sample_power_law_weights(10**6, 2.5, x_min, seed=21)
    assert abs(w.weights.mean() / 10 - 1) < 0.02


def test_chung_lu_capped_probability():
    w = WeightSequence(np.array([10.0, 10.0]), 2.5, 1.0)
    for seed in range(20):
        assert edge_set(generate_chung_lu(w, seed)) == {(0, 1)}


def test_chung_lu_three_vertex_binomial():
    w = WeightSequence(np.full(3, 1.5), 2.5, 1.0)
    seeds = 10_000
    counts = {(0, 1): 0, (0, 2): 0, (1, 2): 0}
    for seed in range(seeds):
        for e in edge_set(generate_chung_lu(w, seed)):
            counts[e] += 1
    p = 1.5 / 3
    sigma = math.sqrt(seeds * p * (1 - p))
    for c in counts.values():
        assert abs(c - seeds * p) <= 3 * sigma


def naive_chung_lu(weights: np.ndarray, seed: int):
    # one scalar draw per pair, visiting pairs x < y lexicographically
    rng = make_rng(seed, EDGE_STREAM)
    vol = math.fsum(weights.tolist())
    edges = set()
    n = len(weights)
    for x in range(n):
        for y in range(x + 1, n):
            if rng.random() < min(weights[x] * weights[y] / vol, 1.0):
                edges.add((x, y))
    return edges


@pytest.mark.parametrize("n, seed", [(2, 0), (17, 1), (128, 2), (512, 3)])
def test_chung_lu_matches_naive_reference(n, seed):
    w = sample_power_law_weights(n, 2.3, 2.0, seed)
    assert edge_set(generate_chung_lu(w, seed, method="exact")) == naive_chung_lu(w.weights, seed)


def test_chung_lu_skip_path_has_right_pair_frequencies():
    w = sample_power_law_weights(60, 2.2, 3.0, seed=9)
    reps = 3000
    freq = np.zeros((60, 60))
    for seed in range(reps):
        e = generate_chung_lu(w, seed, method="skip").edges()
        freq[e[:, 0], e[:, 1]] += 1
    x, y = np.triu_indices(60, 1)
    p = np.minimum(w.weights[x] * w.weights[y] / w.volume, 1.0)
    obs = freq[x, y]
    sigma = np.sqrt(reps * p * (1 - p)) + 1e-12
    z = (obs - reps * p) / sigma
    # per-pair 5 sigma, and the total edge count within 4 sigma
    assert np.all(np.abs(z[p < 1]) < 5)
    assert np.all(obs[p >= 1] == reps)
    total_sigma = math.sqrt(float(np.sum(reps * p * (1 - p))))
    assert abs(obs.sum() - reps * p.sum()) < 4 * total_sigma


def test_chung_lu_degree_concentration():
    n = 10**4
    w = sample_power_law_weights(n, 2.5, x_min_for_mean(2.5, 10), seed=31)
    g = generate_chung_lu(w, seed=31)
    heavy = w.weights >= 32 * math.log(n)
    assert heavy.sum() > 0
    assert np.mean(g.out_degree[heavy] < w.weights[heavy] / 2) < 0.01


def test_chung_lu_power_law_deterministic():
    assert chung_lu_power_law(3000, 2.5, seed=7, nu=10) == chung_lu_power_law(3000, 2.5, seed=7, nu=10)
    with pytest.raises(ValueError):
        chung_lu_power_law(10, 2.5, seed=7)


def test_er_extremes():
    assert generate_er(30, 0.0, seed=1).num_edges == 0
    assert generate_er(30, 1.0, seed=1).num_edges == 30 * 29 // 2
    with pytest.raises(ValueError):
        generate_er(10, 1.5, seed=1)


def test_er_edge_count_within_5_sigma():
    n, p = 400, 0.03
    mean = n * (n - 1) / 2 * p
    sigma = math.sqrt(mean * (1 - p))
    counts = [generate_er(n, p, seed).num_edges for seed in range(40)]
    assert all(abs(c - mean) <= 5 * sigma for c in counts)
    assert abs(np.mean(counts) - mean) <= 5 * sigma / math.sqrt(40)


def test_er_pairs_uniform():
    n, p, reps = 12, 0.3, 4000
    freq = np.zeros((n, n))
    for seed in range(reps):
        e = generate_er(n, p, seed).edges()
        freq[e[:, 0], e[:, 1]] += 1
    obs = freq[np.triu_indices(n, 1)]
    assert np.all(np.abs(obs - reps * p) < 5 * math.sqrt(reps * p * (1 - p)))


def test_er_connected_whp():
    n = 2000
    p = 2 * math.log(n) / n
    connected = sum(bool(np.all(bfs(generate_er(n, p, seed), 0) < 2**32 - 1)) for seed in range(100))
    assert connected >= 99


def test_er_deterministic():
    assert generate_er(500, 0.02, seed=4) == generate_er(500, 0.02, seed=4)
    assert generate_er(500, 0.02, seed=4) != generate_er(500, 0.02, seed=5)
