"""Distribution- and memory-based continuous search.

These operators keep per-vertex state in the population's shared store:
the CMA component carries a full sampling distribution, the swarm
component carries velocities and personal/global bests.  Incoming batches
are treated as the evaluated solution set the model learns from; fresh
offspring are sampled afterwards.
"""
from __future__ import annotations

import numpy as np

from ..cmaes import CmaEs
from ..encodings import Encoding, require_encoding
from ..errors import PopulationTooSmall


def search_cma(genomes, fitness, spec, params, state, rng):
    require_encoding(spec, Encoding.CONTINUOUS, "covariance matrix adaptation search")
    n = len(genomes)
    es = state.get("es")
    if es is None:
        es = CmaEs(
            x0=genomes[np.argmin(fitness)],
            sigma0=0.3 * float(np.mean(spec.upper - spec.lower)),
            popsize=max(n, 2),
            rng=rng,
        )
        state["es"] = es
    else:
        es.rng = rng
        es.tell(genomes.astype(float), fitness)
    return spec.clip(es.ask(n))


def search_eda(genomes, fitness, spec, params, state, rng):
    """Estimation of distribution: fit a diagonal gaussian to the better
    half, sample the whole batch from it."""
    require_encoding(spec, Encoding.CONTINUOUS, "estimation-of-distribution search")
    n = len(genomes)
    order = np.argsort(fitness, kind="stable")
    elite = genomes[order[: max(n // 2, 1)]].astype(float)
    mean = elite.mean(axis=0)
    var = np.maximum(elite.var(axis=0), 1e-12)
    out = mean + np.sqrt(var) * rng.standard_normal((n, genomes.shape[1]))
    return spec.clip(out)


def search_pso(genomes, fitness, spec, params, state, rng):
    require_encoding(spec, Encoding.CONTINUOUS, "particle swarm search")
    w = float(params.get("w", 0.7))
    c1 = float(params.get("c1", 1.5))
    c2 = float(params.get("c2", 1.5))
    x = genomes.astype(float)
    n, dim = x.shape
    if "velocity" not in state or len(state["velocity"]) != n:
        state["velocity"] = np.zeros((n, dim))
        state["pbest"] = x.copy()
        state["pbest_f"] = np.asarray(fitness, dtype=float).copy()
    else:
        improved = fitness < state["pbest_f"]
        state["pbest"][improved] = x[improved]
        state["pbest_f"][improved] = fitness[improved]
    g = state["pbest"][np.argmin(state["pbest_f"])]
    r1 = rng.random((n, dim))
    r2 = rng.random((n, dim))
    v = w * state["velocity"] + c1 * r1 * (state["pbest"] - x) + c2 * r2 * (g - x)
    state["velocity"] = v
    return spec.clip(x + v)


def _de_pick(n, i, count, rng):
    pool = np.delete(np.arange(n), i)
    return rng.choice(pool, size=count, replace=False)


def _de_crossover(target, mutant, cr, rng):
    dim = len(target)
    mask = rng.random(dim) < cr
    mask[rng.integers(dim)] = True
    return np.where(mask, mutant, target)


def _search_de(genomes, fitness, spec, params, state, rng, variant):
    require_encoding(spec, Encoding.CONTINUOUS, "differential evolution search")
    n = len(genomes)
    if n < 4:
        raise PopulationTooSmall(f"differential evolution needs at least 4 members, got {n}")
    f = float(params.get("f", 0.5))
    cr = float(params.get("cr", 0.9))
    x = genomes.astype(float)
    best = x[np.argmin(fitness)]
    out = np.empty_like(x)
    for i in range(n):
        if variant == "random":
            r1, r2, r3 = _de_pick(n, i, 3, rng)
            mutant = x[r1] + f * (x[r2] - x[r3])
        elif variant == "current":
            r1, r2 = _de_pick(n, i, 2, rng)
            mutant = x[i] + f * (x[r1] - x[r2])
        else:  # current-to-best
            r1, r2 = _de_pick(n, i, 2, rng)
            mutant = x[i] + f * (best - x[i]) + f * (x[r1] - x[r2])
        out[i] = _de_crossover(x[i], mutant, cr, rng)
    return spec.clip(out)


def search_de_random(genomes, fitness, spec, params, state, rng):
    return _search_de(genomes, fitness, spec, params, state, rng, "random")


def search_de_current(genomes, fitness, spec, params, state, rng):
    return _search_de(genomes, fitness, spec, params, state, rng, "current")


def search_de_current_best(genomes, fitness, spec, params, state, rng):
    return _search_de(genomes, fitness, spec, params, state, rng, "current_best")


MODEL_OPS = {
    "search_cma": search_cma,
    "search_eda": search_eda,
    "search_pso": search_pso,
    "search_de_random": search_de_random,
    "search_de_current": search_de_current,
    "search_de_current_best": search_de_current_best,
}
