import math
from collections import Counter
from itertools import combinations

import numpy as np
import pytest
from scipy import integrate, stats

from oracles import direct_sum, factorial_valuations
from primecurves.arithmetic import primes_up_to
from primecurves.spectral import (
    CramerExhaustedError,
    ModelKind,
    SamplingGrid,
    build_cramer_model,
    build_model,
    build_prime_model,
    build_random_frequency_model,
    build_shuffled_model,
    cramer_probabilities,
    evaluate,
    l2_norm_squared,
    partial_fisher_yates,
    trapezoid_l2_norm_squared,
)
from primecurves.rng import derive_seed, make_generator, splitmix64

RANDOMIZED = [ModelKind.RANDOM_FREQUENCY, ModelKind.CRAMER, ModelKind.SHUFFLED]


def weight_multiset(n):
    return sorted(factorial_valuations(n).values())


@pytest.mark.parametrize(
    "n, terms",
    [(6, [(2, 4), (3, 2), (5, 1)]), (2, [(2, 1)]), (4, [(2, 3), (3, 1)])],
)
def test_prime_model_terms(n, terms):
    assert sorted(factorial_valuations(n).items()) == terms
    model = build_prime_model(n)
    assert model.terms == terms
    assert model.kind is ModelKind.PRIME and model.seed is None


def test_prime_model_rejects_small_n():
    with pytest.raises(ValueError):
        build_prime_model(1)


def test_random_frequency_small_cases():
    for seed in range(50):
        m3 = build_random_frequency_model(3, seed)
        assert set(m3.frequencies) <= {1, 2, 3} and len(set(m3.frequencies)) == 2
        assert sorted(m3.weights) == [1, 1]
        m2 = build_random_frequency_model(2, seed)
        assert m2.frequencies[0] in (1, 2) and m2.terms[0][1] == 1


def test_random_frequency_pairs_weights_in_prime_order():
    model = build_random_frequency_model(6, 11)
    assert list(model.weights) == [4, 2, 1]
    assert list(model.frequencies) == sorted(model.frequencies)


@pytest.mark.parametrize("kind", RANDOMIZED)
def test_weight_multiset_preserved_n6(kind):
    for seed in range(100):
        model = build_model(kind, 6, seed)
        assert sorted(model.weights) == [1, 2, 4]


def test_shuffled_keeps_prime_frequencies():
    for seed in range(100):
        model = build_shuffled_model(6, seed)
        assert list(model.frequencies) == [2, 3, 5]
    assert build_shuffled_model(2, 5).terms == build_prime_model(2).terms


def test_shuffled_n4_both_permutations_uniform():
    counts = Counter(tuple(build_shuffled_model(4, s).weights) for s in range(10_000))
    assert set(counts) == {(3, 1), (1, 3)}
    assert stats.chisquare(list(counts.values())).pvalue > 0.01


def test_partial_fisher_yates_uniform_over_subsets():
    rng = make_generator(7)
    counts = Counter(frozenset(partial_fisher_yates(5, 3, rng).tolist()) for _ in range(20_000))
    assert set(counts) == {frozenset(c) for c in combinations(range(5), 3)}
    assert stats.chisquare(list(counts.values())).pvalue > 0.01


def test_cramer_n6_contract():
    for seed in range(100):
        model = build_cramer_model(6, seed)
        assert sorted(model.weights) == [1, 2, 4]
        f = model.frequencies.tolist()
        assert len(set(f)) == 3 and all(2 <= q <= 6 for q in f)
        assert f == sorted(f) and f[0] == 2  # k = 2 is always selected


def test_cramer_first_selected_values():
    # find a seed whose first trial keeps every k in 2..5
    probs = cramer_probabilities(5)
    for seed in range(1000):
        if np.all(make_generator(seed).random(probs.size) < probs):
            break
    else:
        pytest.fail("no all-selected seed found")
    assert build_cramer_model(5, seed).frequencies.tolist() == [2, 3, 4]


def test_cramer_selection_count_matches_bernoulli_sum():
    n = 100
    expected = 1.0 + sum(1.0 / math.log(k) for k in range(3, n + 1))
    probs = cramer_probabilities(n)
    assert probs[0] == 1.0
    counts = np.array([(make_generator(s).random(probs.size) < probs).sum() for s in range(10_000)])
    se = counts.std(ddof=1) / math.sqrt(counts.size)
    assert abs(counts.mean() - expected) < 3 * se


def test_cramer_exhaustion():
    # n = 5 needs 3 of {2..5}; with one attempt some seed must come up short
    failures = 0
    for seed in range(200):
        try:
            build_cramer_model(5, seed, max_attempts=1)
        except CramerExhaustedError as exc:
            failures += 1
            assert exc.seed == seed and exc.attempts == 1
    assert failures > 0
    with pytest.raises(ValueError):
        build_cramer_model(4, 0)


@pytest.mark.parametrize("kind", list(ModelKind))
def test_model_invariants_n500(kind):
    n = 500
    primes = primes_up_to(n).primes
    w = weight_multiset(n)
    for seed in range(20):
        model = build_model(kind, n, seed)
        f = model.frequencies.tolist()
        assert len(f) == len(primes) == len(set(f))
        assert sorted(model.weights.tolist()) == w
        if kind in (ModelKind.PRIME, ModelKind.SHUFFLED):
            assert f == list(primes)
        elif kind is ModelKind.RANDOM_FREQUENCY:
            assert 1 <= min(f) and max(f) <= n
        else:
            assert 2 <= min(f) and max(f) <= n


@pytest.mark.parametrize("kind", RANDOMIZED)
def test_determinism(kind):
    a = build_model(kind, 300, 123456789)
    b = build_model(kind, 300, 123456789)
    assert a == b and a.terms == b.terms
    c = build_model(kind, 300, 987654321)
    assert a != c


def test_seed_derivation():
    assert splitmix64(0) == 0xE220A8397B1DCDAF  # first splitmix64 output for state 0
    seeds = {derive_seed(1, k.value, i) for k in ModelKind for i in range(1000)}
    assert len(seeds) == 4000
    assert derive_seed(1, "cramer", 3) == derive_seed(1, "cramer", 3)
    with pytest.raises(ValueError):
        derive_seed(-1, "cramer", 0)


def test_grid_nodes():
    grid = SamplingGrid.uniform(9)
    j = np.arange(1, 10)
    assert np.allclose(grid.nodes, -math.pi + 2 * math.pi * (j - 1) / 8, atol=1e-15)
    assert grid.nodes[0] == -math.pi and grid.nodes[-1] == math.pi
    assert np.array_equal(grid.nodes, -grid.nodes[::-1])
    with pytest.raises(ValueError):
        SamplingGrid.uniform(1)


def test_evaluate_at_zero_and_pi():
    model = build_prime_model(6)
    sample = evaluate(model, 3)  # nodes -pi, 0, pi
    assert sample.points[1] == pytest.approx((7.0, 0.0), abs=1e-12)
    assert direct_sum(model.terms, math.pi) == pytest.approx((1.0, 0.0), abs=1e-12)
    assert sample.points[2] == pytest.approx((1.0, 0.0), abs=1e-12)
    assert sample.points[0] == pytest.approx((1.0, 0.0), abs=1e-12)


@pytest.mark.parametrize("kind", list(ModelKind))
def test_evaluate_matches_direct_sum(kind):
    model = build_model(kind, 60, 42)
    sample = evaluate(model, 101)
    for j in range(0, 101, 7):
        ref = direct_sum(model.terms, float(sample.grid.nodes[j]))
        assert sample.points[j] == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize("n", [6, 30, 100])
def test_conjugate_symmetry(n):
    sample = evaluate(build_prime_model(n), 1001)
    mirrored = sample.points[::-1] * np.array([1.0, -1.0])
    assert np.max(np.abs(sample.points - mirrored)) < 1e-10


@pytest.mark.parametrize("kind", list(ModelKind))
def test_fft_path_agrees(kind):
    for n, count in ((50, 257), (1000, 4096), (300, 100)):
        model = build_model(kind, n, 9)
        a = evaluate(model, count)
        b = evaluate(model, count, method="fft")
        assert np.max(np.abs(a.points - b.points)) < 1e-9
    with pytest.raises(ValueError):
        evaluate(model, 16, method="nufft")


def test_l2_norm_examples():
    assert l2_norm_squared(build_prime_model(6)) == pytest.approx(42 * math.pi, rel=1e-15)
    assert l2_norm_squared(build_prime_model(6)) == pytest.approx(131.946891450771, rel=1e-12)
    assert l2_norm_squared(build_prime_model(2)) == pytest.approx(2 * math.pi, rel=1e-15)


@pytest.mark.parametrize("kind", list(ModelKind))
def test_parseval_quadrature(kind):
    model = build_model(kind, 50, 3)
    sample = evaluate(model, 1 << 13)
    mod2 = sample.x**2 + sample.y**2
    oracle = integrate.trapezoid(mod2, sample.grid.nodes)
    closed = l2_norm_squared(model)
    assert oracle == pytest.approx(closed, rel=1e-6)
    assert trapezoid_l2_norm_squared(sample) == pytest.approx(closed, rel=1e-6)


def test_model_kind_parsing():
    assert ModelKind.parse("Random_Frequency") is ModelKind.RANDOM_FREQUENCY
    assert ModelKind.parse("random") is ModelKind.RANDOM_FREQUENCY
    with pytest.raises(ValueError, match="unknown model kind"):
        ModelKind.parse("gaussian")
    with pytest.raises(ValueError, match="needs a seed"):
        build_model("shuffled", 10)
