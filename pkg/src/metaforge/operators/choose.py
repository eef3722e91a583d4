"""Parent selection: where the next round of search starts from.

Every variant maps a population to a multiset of parent indices of the
same size.  Fitness is minimized throughout; rank-based weights are used
wherever the raw fitness scale would otherwise leak in (raw values may be
negative or huge, so proportional selection on them is undefined).
"""
from __future__ import annotations

import numpy as np

from ..errors import EmptyPopulation
from ..population import Population


def _average_ranks(x: np.ndarray) -> np.ndarray:
    n = len(x)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(n)
    ranks[order] = np.arange(1, n + 1)
    uniq, inverse, counts = np.unique(x, return_inverse=True, return_counts=True)
    mean_per_value = np.bincount(inverse, weights=ranks) / counts
    return mean_per_value[inverse]


def _rank_weights(fitness: np.ndarray) -> np.ndarray:
    # rank 1 = best; weight N - rank + 1, ties share the average weight
    n = len(fitness)
    w = n - _average_ranks(np.asarray(fitness, dtype=float)) + 1.0
    return w / w.sum()


def _weighted_draw(weights: np.ndarray, count: int, rng) -> np.ndarray:
    cdf = np.cumsum(weights)
    idx = np.searchsorted(cdf, rng.random(count) * cdf[-1], side="right")
    return np.minimum(idx, len(weights) - 1)


def _pairwise_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aa = np.einsum("ij,ij->i", a, a)[:, None]
    bb = np.einsum("ij,ij->i", b, b)[None, :]
    return np.sqrt(np.maximum(aa + bb - 2.0 * (a @ b.T), 0.0))


def choose_roulette_wheel(pop: Population, params, rng) -> np.ndarray:
    if pop.size == 0:
        raise EmptyPopulation("roulette selection on empty population")
    return _weighted_draw(_rank_weights(pop.fitness), pop.size, rng)


def choose_tournament(pop: Population, params, rng) -> np.ndarray:
    if pop.size == 0:
        raise EmptyPopulation("tournament selection on empty population")
    n = pop.size
    k = min(int(params.get("k", 2)), n)
    if k < n:
        keys = rng.random((n, n))
        entrants = np.argpartition(keys, k - 1, axis=1)[:, :k]
    else:
        entrants = np.broadcast_to(np.arange(n), (n, n))
    winners = entrants[np.arange(n), np.argmin(pop.fitness[entrants], axis=1)]
    return winners


def choose_traverse(pop: Population, params, rng) -> np.ndarray:
    if pop.size == 0:
        raise EmptyPopulation("traverse selection on empty population")
    return np.arange(pop.size)


def choose_cluster(pop: Population, params, rng) -> np.ndarray:
    """Idea pick-up: cluster the genomes, then favor good clusters and
    their best members."""
    if pop.size == 0:
        raise EmptyPopulation("cluster selection on empty population")
    k = min(int(params.get("k", 3)), pop.size)
    x = pop.genomes.astype(float)
    centers = x[rng.choice(pop.size, size=k, replace=False)]
    labels = np.zeros(pop.size, dtype=int)
    for _ in range(5):
        d = _pairwise_dists(x, centers)
        labels = np.argmin(d, axis=1)
        for c in range(k):
            mask = labels == c
            if mask.any():
                centers[c] = x[mask].mean(axis=0)
    members = [np.flatnonzero(labels == c) for c in range(k)]
    members = [m for m in members if len(m)]
    best_fit = np.array([pop.fitness[m].min() for m in members])
    best_member = np.array([m[np.argmin(pop.fitness[m])] for m in members])
    cw = _rank_weights(best_fit)
    picks = _weighted_draw(cw, pop.size, rng)
    take_best = rng.random(pop.size) < 0.7
    spots = rng.random(pop.size)  # one uniform draw per slot for the random pick
    out = np.empty(pop.size, dtype=int)
    for i in range(pop.size):
        m = members[picks[i]]
        out[i] = best_member[picks[i]] if take_best[i] else m[int(spots[i] * len(m))]
    return out


def _nearest_better_niches(pop: Population, phi: float = 2.0) -> list:
    """Nearest-better clustering: link each member to its closest strictly
    better member, cut links longer than phi x mean link length."""
    x = pop.genomes.astype(float)
    n = pop.size
    d = _pairwise_dists(x, x)
    order = np.argsort(pop.fitness, kind="stable")
    rank_of = np.empty(n, dtype=int)
    rank_of[order] = np.arange(n)
    blocked = np.where(rank_of[None, :] < rank_of[:, None], d, np.inf)
    targets = np.argmin(blocked, axis=1)
    has_better = rank_of > 0
    links = {i: int(targets[i]) for i in np.flatnonzero(has_better)}
    lengths = blocked[np.arange(n), targets][has_better]
    mean_len = float(np.mean(lengths)) if len(lengths) else 0.0
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in links.items():
        if mean_len == 0.0 or d[i, j] <= phi * mean_len:
            parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [np.array(g) for g in groups.values()]


def choose_nich(pop: Population, params, rng) -> np.ndarray:
    """Adaptive niching: emit parents in same-niche consecutive pairs so a
    following crossover recombines within niches."""
    if pop.size == 0:
        raise EmptyPopulation("niching selection on empty population")
    niches = _nearest_better_niches(pop)
    sizes = np.array([len(g) for g in niches], dtype=float)
    weights = sizes / sizes.sum()
    n_pairs = (pop.size + 1) // 2
    picks = _weighted_draw(weights, n_pairs, rng)
    spots = rng.random((n_pairs, 2))
    out = []
    for c, (u1, u2) in zip(picks, spots):
        g = niches[c]
        out.append(int(g[int(u1 * len(g))]))
        if len(out) < pop.size:
            out.append(int(g[int(u2 * len(g))]))
    return np.array(out[: pop.size])


CHOOSE_OPS = {
    "choose_roulette_wheel": choose_roulette_wheel,
    "choose_tournament": choose_tournament,
    "choose_traverse": choose_traverse,
    "choose_cluster": choose_cluster,
    "choose_nich": choose_nich,
}
