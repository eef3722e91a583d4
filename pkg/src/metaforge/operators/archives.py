"""Observer collections updated once per iteration after selection.

Archives never feed back into the search flow; their contents are part of
the solve result.  The tabu archive additionally exposes its entries to
the executor, which blocks offspring that exactly match one before
selection (continuous genomes are matched after rounding to 6 decimals).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TABU_DECIMALS = 6


@dataclass
class ArchiveState:
    genomes: list = field(default_factory=list)
    fitness: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)  # variant-private caches

    def as_arrays(self):
        if not self.genomes:
            return np.empty((0, 0)), np.empty(0)
        return np.stack(self.genomes), np.array(self.fitness)


def _genome_key(genome: np.ndarray):
    arr = np.asarray(genome)
    if np.issubdtype(arr.dtype, np.floating):
        arr = np.round(arr, TABU_DECIMALS)
    return arr.tobytes()


def archive_best(state, pop, accepted, params):
    """Keep the best ``capacity`` solutions seen so far."""
    state = state or ArchiveState()
    cap = max(int(params.get("capacity", 10)), 1)
    for g, f in zip(pop.genomes, pop.fitness):
        state.genomes.append(np.array(g))
        state.fitness.append(float(f))
    order = np.argsort(np.array(state.fitness), kind="stable")[:cap]
    state.genomes = [state.genomes[i] for i in order]
    state.fitness = [state.fitness[i] for i in order]
    return state


def _dists_to(genome: np.ndarray, members: list) -> np.ndarray:
    if not members:
        return np.empty(0)
    x = np.stack(members).astype(float)
    return np.linalg.norm(x - np.asarray(genome, dtype=float), axis=1)


def _min_excluding(dmat: np.ndarray) -> np.ndarray:
    """min pairwise distance of the set left after dropping each index."""
    m = len(dmat)
    masked = dmat + np.where(np.eye(m, dtype=bool), np.inf, 0.0)
    out = np.empty(m)
    flat = np.argmin(masked)
    a, b = divmod(flat, m)
    global_min = masked[a, b]
    for j in range(m):
        if j != a and j != b:
            out[j] = global_min
        else:
            sub = np.delete(np.delete(masked, j, axis=0), j, axis=1)
            out[j] = np.min(sub) if len(sub) else np.inf
    return out


def archive_diversity(state, pop, accepted, params):
    """Greedy max-min collection: a newcomer enters only when dropping one
    current member leaves the capacity-sized set more spread out.

    The pairwise distance matrix of the held set is carried in the state
    so each candidate costs one distance row, not a full recomputation.
    """
    state = state or ArchiveState()
    cap = max(int(params.get("capacity", 10)), 1)
    keys = state.extra.setdefault("keys", {_genome_key(g) for g in state.genomes})
    dmat = state.extra.get("dmat")
    if dmat is None:
        n0 = len(state.genomes)
        dmat = np.zeros((n0, n0))
        for i, g in enumerate(state.genomes):
            dmat[i, :] = _dists_to(g, state.genomes)
        state.extra["dmat"] = dmat
    for g, f in zip(pop.genomes, pop.fitness):
        g = np.array(g)
        key = _genome_key(g)
        if key in keys:
            continue
        d_new = _dists_to(g, state.genomes)
        m = len(state.genomes)
        grown = np.zeros((m + 1, m + 1))
        grown[:m, :m] = dmat
        grown[m, :m] = d_new
        grown[:m, m] = d_new
        if m < cap:
            state.genomes.append(g)
            state.fitness.append(float(f))
            keys.add(key)
            dmat = grown
            continue
        # drop whichever element leaves the most spread-out set; dropping
        # the newcomer itself (index m) means rejecting it
        scores = _min_excluding(grown)
        drop = int(np.argmax(scores))
        if drop == m or scores[drop] <= scores[m]:
            continue
        keys.discard(_genome_key(state.genomes[drop]))
        keys.add(key)
        del state.genomes[drop]
        del state.fitness[drop]
        state.genomes.append(g)
        state.fitness.append(float(f))
        dmat = np.delete(np.delete(grown, drop, axis=0), drop, axis=1)
    state.extra["dmat"] = dmat
    return state


def archive_tabu(state, pop, accepted, params):
    """FIFO of the genomes accepted into the population most recently."""
    state = state or ArchiveState()
    tenure = max(int(params.get("tenure", 10)), 1)
    for i in np.flatnonzero(accepted):
        state.genomes.append(np.array(pop.genomes[i]))
        state.fitness.append(float(pop.fitness[i]))
    state.genomes = state.genomes[-tenure:]
    state.fitness = state.fitness[-tenure:]
    return state


def tabu_keys(state) -> set:
    if state is None:
        return set()
    return {_genome_key(g) for g in state.genomes}


ARCHIVE_OPS = {
    "archive_best": archive_best,
    "archive_diversity": archive_diversity,
    "archive_tabu": archive_tabu,
}
