import numpy as np
import pytest

from metaforge.errors import EmptyPopulation
from metaforge.operators.choose import (
    choose_cluster,
    choose_nich,
    choose_roulette_wheel,
    choose_tournament,
    choose_traverse,
)

ALL_CHOOSE = [
    (choose_roulette_wheel, {}),
    (choose_tournament, {"k": 3}),
    (choose_traverse, {}),
    (choose_cluster, {"k": 3}),
    (choose_nich, {}),
]


def test_traverse_is_identity_traversal(pop_factory):
    pop = pop_factory(np.arange(8).reshape(4, 2))
    idx = choose_traverse(pop, {}, np.random.default_rng(0))
    assert idx.tolist() == [0, 1, 2, 3]


def test_degenerate_tournament_all_best(pop_factory):
    pop = pop_factory(np.zeros((4, 3)), fitness=[5.0, 4.0, 1.0, 9.0])
    idx = choose_tournament(pop, {"k": 4}, np.random.default_rng(0))
    assert np.all(idx == 2)


def test_roulette_uniform_on_equal_fitness(pop_factory):
    """Multinomial oracle: equal fitness must give uniform frequencies
    within 3 sigma over 10,000 draws."""
    n = 8
    draws = 10_000
    pop = pop_factory(np.zeros((n, 2)), fitness=np.zeros(n))
    rng = np.random.default_rng(123)
    counts = np.zeros(n)
    for _ in range(draws // n):
        idx = choose_roulette_wheel(pop, {}, rng)
        counts += np.bincount(idx, minlength=n)
    total = counts.sum()
    p = 1.0 / n
    sigma = np.sqrt(total * p * (1 - p))
    assert np.all(np.abs(counts - total * p) <= 3 * sigma)


def test_roulette_prefers_better(pop_factory):
    pop = pop_factory(np.zeros((5, 2)), fitness=[1.0, 2.0, 3.0, 4.0, 5.0])
    rng = np.random.default_rng(7)
    idx = np.concatenate([choose_roulette_wheel(pop, {}, rng) for _ in range(2000)])
    counts = np.bincount(idx, minlength=5)
    assert counts[0] > counts[4]


@pytest.mark.parametrize("fn,params", ALL_CHOOSE)
def test_size_preserved_and_indices_valid(fn, params, pop_factory):
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(2, 12))
        pop = pop_factory(rng.integers(0, 4, size=(n, 5)), fitness=rng.normal(size=n))
        idx = fn(pop, params, rng)
        assert len(idx) == n
        assert np.all((idx >= 0) & (idx < n))


@pytest.mark.parametrize("fn,params", ALL_CHOOSE)
def test_empty_population_raises(fn, params, pop_factory):
    pop = pop_factory(np.zeros((0, 3)), fitness=np.zeros(0))
    with pytest.raises(EmptyPopulation):
        fn(pop, params, np.random.default_rng(0))


@pytest.mark.parametrize("fn,params", ALL_CHOOSE)
def test_deterministic_given_seed(fn, params, pop_factory):
    pop = pop_factory(np.random.default_rng(3).integers(0, 5, size=(9, 4)),
                      fitness=np.random.default_rng(4).normal(size=9))
    a = fn(pop, params, np.random.default_rng(99))
    b = fn(pop, params, np.random.default_rng(99))
    assert np.array_equal(a, b)


def test_nich_emits_same_niche_pairs(pop_factory):
    """Two well-separated clusters: consecutive parent pairs must come from
    one cluster, never straddle both."""
    left = np.zeros((5, 2))
    right = np.full((5, 2), 100.0)
    genomes = np.vstack([left, right])
    fitness = np.array([0.0, 1, 2, 3, 4, 0.5, 1.5, 2.5, 3.5, 4.5])
    pop = pop_factory(genomes, fitness=fitness)
    rng = np.random.default_rng(0)
    for _ in range(20):
        idx = choose_nich(pop, {}, rng)
        for a, b in zip(idx[::2], idx[1::2]):
            assert (a < 5) == (b < 5)
