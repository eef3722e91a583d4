"""Interpret an algorithm graph to solve a problem instance.

One solve run initializes a uniform-random population, then iterates the
graph: the choose vertex picks parents, every search pathway transforms
the full parent set (a vertex with several successors feeds each of them
its output), the merged offspring pool is resampled back to the population
size, evaluated, and handed to the update vertex; archives observe the
survivors.  Offspring evaluation is the only thing that consumes the
function-evaluation budget.  Iterations start only while a full offspring
batch still fits in the budget.
"""
from __future__ import annotations

import io
import time
from dataclasses import dataclass

import numpy as np

from .catalog import Role
from .encodings import Encoding
from .errors import EvaluationFailure, InvalidGraph, UnknownBaseline
from .graphs import AlgorithmGraph, build_chain, build_default_space, validate_graph
from .operators import ARCHIVE_OPS, CHOOSE_OPS, SEARCH_OPS, UPDATE_OPS, tabu_keys
from .operators.archives import _genome_key
from .population import Population
from .problems import ProblemInstance


@dataclass(frozen=True)
class SolveConfig:
    """Run parameters: population size, FE budget, seed, record granularity."""

    population_size: int = 50
    max_fe: int = 10_000
    seed: int = 0
    record_granularity: int | None = None  # defaults to population_size

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if self.max_fe < self.population_size:
            raise ValueError("max_fe must cover at least the initial population")

    @property
    def granularity(self) -> int:
        return self.record_granularity or self.population_size


@dataclass
class SolveRecord:
    """Best-so-far trajectory plus the final population of one run."""

    trajectory: list          # (fe, best penalized fitness), fe strictly increasing
    trajectory_times: list    # wall-clock seconds per trajectory point
    final_population: Population
    archives: dict            # vertex id -> ArchiveState
    elapsed_seconds: float

    @property
    def final_fe(self) -> int:
        return self.trajectory[-1][0]

    @property
    def best_fitness(self) -> float:
        return self.trajectory[-1][1]

    def trajectory_csv(self) -> str:
        buf = io.StringIO()
        buf.write("fe,best_fitness\n")
        for fe, fit in self.trajectory:
            buf.write(f"{fe},{fit!r}\n")
        return buf.getvalue()


def _graph_plan(graph: AlgorithmGraph):
    """Execution order: choose, search vertices topologically, update, archives."""
    entry = graph.vertex(graph.entry)
    update = graph.update_vertex
    archive_ids = [v.id for v in graph.by_role(Role.ARCHIVE)]
    order = []
    stack = [t for t in sorted(graph.successors(entry.id), reverse=True)]
    seen = set()
    while stack:
        vid = stack.pop()
        if vid in seen or vid == update.id:
            continue
        seen.add(vid)
        order.append(vid)
        for t in sorted(graph.successors(vid), reverse=True):
            stack.append(t)
    leaves = sorted(f for f, t in graph.edges if t == update.id)
    return entry, order, leaves, update, archive_ids


def solve(graph: AlgorithmGraph, problem: ProblemInstance, config: SolveConfig) -> SolveRecord:
    """Run the algorithm described by ``graph`` on one problem instance."""
    space = build_default_space(problem.encoding, max_search_vertices=10_000, max_pathways=10_000)
    report = validate_graph(graph, space)
    if report:
        raise InvalidGraph(report)
    if graph.encoding is not problem.encoding:
        raise InvalidGraph([f"graph encoding {graph.encoding.value} != problem {problem.encoding.value}"])

    rng = np.random.default_rng(np.uint64(config.seed))
    n = config.population_size
    started = time.perf_counter()
    fe = 0

    def evaluate(genomes):
        nonlocal fe
        try:
            raw, viol = problem.evaluate_many(genomes)
        except Exception as e:  # propagate with the FE count reached
            raise EvaluationFailure(e, fe, problem.instance_id) from e
        fe += len(genomes)
        fitness = raw + problem.penalty_coeff * viol
        return fitness, raw, viol

    genomes = problem.spec.sample(n, rng)
    fitness, raw, viol = evaluate(genomes)
    pop = Population(genomes, fitness, raw, viol)

    best = float(np.min(fitness))
    trajectory = [(fe, best)]
    times = [time.perf_counter() - started]
    next_record = fe + config.granularity

    entry, search_order, leaves, update, archive_ids = _graph_plan(graph)
    choose_fn = CHOOSE_OPS[entry.component]
    update_fn = UPDATE_OPS[update.component]
    archives = {vid: None for vid in archive_ids}
    tabu_ids = [vid for vid in archive_ids if graph.vertex(vid).component == "archive_tabu"]

    while fe + n <= config.max_fe:
        pop.iteration += 1
        parent_idx = choose_fn(pop, entry.params, rng)
        parent_genomes = pop.genomes[parent_idx]
        parent_fitness = pop.fitness[parent_idx]

        outputs = {entry.id: parent_genomes}
        for vid in search_order:
            v = graph.vertex(vid)
            src = graph.predecessors(vid)[0]
            batch = outputs[src]
            fn = SEARCH_OPS[v.component]
            state = pop.state_for(vid)
            for _ in range(v.loop_count):
                batch = fn(batch, parent_fitness, problem.spec, v.params, state, rng)
            outputs[vid] = batch

        pool = np.concatenate([outputs[vid] for vid in leaves], axis=0)
        if len(pool) > n:
            pool = pool[rng.choice(len(pool), size=n, replace=False)]
        elif len(pool) < n:
            pool = pool[rng.choice(len(pool), size=n, replace=True)]

        off_fitness, off_raw, off_viol = evaluate(pool)
        best = min(best, float(np.min(off_fitness)))

        if tabu_ids:
            blocked = set()
            for vid in tabu_ids:
                blocked |= tabu_keys(archives[vid])
            if blocked:
                for i in range(n):
                    if _genome_key(pool[i]) in blocked:
                        off_fitness[i] = np.inf

        sel = update_fn(pop.fitness, off_fitness, update.params, pop.state_for(update.id), rng)
        union_genomes = np.concatenate([pop.genomes, pool], axis=0)
        union_fitness = np.concatenate([pop.fitness, off_fitness])
        union_raw = np.concatenate([pop.raw_fitness, off_raw])
        union_viol = np.concatenate([pop.violation, off_viol])
        accepted = sel >= n
        pop.genomes = union_genomes[sel]
        pop.fitness = union_fitness[sel]
        pop.raw_fitness = union_raw[sel]
        pop.violation = union_viol[sel]

        for vid in archive_ids:
            v = graph.vertex(vid)
            archives[vid] = ARCHIVE_OPS[v.component](archives[vid], pop, accepted, v.params)

        if fe >= next_record:
            trajectory.append((fe, best))
            times.append(time.perf_counter() - started)
            next_record = fe + config.granularity

    if trajectory[-1][0] != fe:
        trajectory.append((fe, best))
        times.append(time.perf_counter() - started)
    return SolveRecord(trajectory, times, pop, archives, time.perf_counter() - started)


# ---------------------------------------------------------------------------
# baseline algorithms
# ---------------------------------------------------------------------------

_BASELINES = ("GA", "ILS", "SA", "RS")

# per-encoding stand-ins for the discrete neighborhood moves the baselines
# are defined with: reset-one -> small local move, reset-rand -> broad move
_RESET_ONE = {
    Encoding.DISCRETE: ("search_reset_one", {}),
    Encoding.CONTINUOUS: ("search_mu_gaussian", {"sigma": 0.1}),
    Encoding.PERMUTATION: ("search_swap", {}),
}
_RESET_RAND = {
    Encoding.DISCRETE: ("search_reset_rand", {"rate": 0.2}),
    Encoding.CONTINUOUS: ("search_mu_uniform", {"rate": 0.2}),
    Encoding.PERMUTATION: ("search_scramble", {}),
}
_CROSS_ONE = {
    Encoding.DISCRETE: ("cross_point_one", {}),
    Encoding.CONTINUOUS: ("cross_point_one", {}),
    Encoding.PERMUTATION: ("cross_order_two", {}),
}
_REINIT = {
    Encoding.DISCRETE: ("reinit_discrete", {}),
    Encoding.CONTINUOUS: ("reinit_continuous", {}),
    Encoding.PERMUTATION: ("reinit_permutation", {}),
}


def make_baseline(name: str, encoding: Encoding = Encoding.DISCRETE) -> AlgorithmGraph:
    """Classic reference algorithms.

    GA: tournament mating, one-point crossover, 0.2-rate random reset,
    round-robin survival.  ILS: per-member single-entity neighborhood move
    with pairwise replacement.  SA: the same move under annealing
    acceptance.  RS: uniform resampling with greedy survival.
    """
    if name not in _BASELINES:
        raise UnknownBaseline(f"unknown baseline {name!r}; pick one of {', '.join(_BASELINES)}")
    if name == "GA":
        return build_chain(
            encoding,
            ("choose_tournament", {"k": 2}),
            [_CROSS_ONE[encoding], _RESET_RAND[encoding]],
            ("update_round_robin", {"q": 10}),
        )
    if name == "ILS":
        return build_chain(encoding, "choose_traverse", [_RESET_ONE[encoding]], "update_pairwise")
    if name == "SA":
        return build_chain(
            encoding,
            "choose_traverse",
            [_RESET_ONE[encoding]],
            ("update_simulated_annealing", {"t0": 3.0}),
        )
    return build_chain(encoding, "choose_traverse", [_REINIT[encoding]], "update_greedy")
