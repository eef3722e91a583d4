"""The design loop: initialize, disturb, tune, evaluate, select.

Topology moves are an iterated local search over the graph space (replace
or insert/delete components, add/remove pathways, loop counts); numeric
hyperparameters are tuned by a small covariance-matrix-adaptation run
over the normalized parameter box.  Selection is elitist, so the best
training aggregate never worsens; the final incumbents are re-scored
exhaustively on held-out test instances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .catalog import Role, component
from .cmaes import default_popsize, minimize
from .errors import EmptySpaceRole
from .evaluation import (
    EvalPlan,
    evaluate_exhaustive,
    evaluate_with_method,
    evaluation_log_rows,
)
from .graphs import AlgorithmGraph, DesignSpace, Vertex, require_valid, same_topology

STAGNATION_WINDOW = 5
TUNE_EVERY = 10
ARCHIVE_PROBABILITY = 0.3


# ---------------------------------------------------------------------------
# sampling helpers
# ---------------------------------------------------------------------------


def _sample_param(space: DesignSpace, comp_name: str, pname: str, rng) -> float:
    lo, hi = space.range_of(comp_name, pname)
    p = component(comp_name).param(pname)
    if p.log_scale and lo > 0:
        value = math.exp(rng.uniform(math.log(lo), math.log(hi)))
    else:
        value = rng.uniform(lo, hi)
    return p.coerce(value)


def _sample_params(space: DesignSpace, comp_name: str, rng) -> dict:
    return {p.name: _sample_param(space, comp_name, p.name, rng) for p in component(comp_name).params}


def _pick(space: DesignSpace, role: Role, rng) -> str:
    names = space.allowed.get(role, ())
    if not names:
        raise EmptySpaceRole(f"design space has no {role.value} components")
    return names[rng.integers(len(names))]


def _resample_tunables(space: DesignSpace, graph: AlgorithmGraph, rng) -> AlgorithmGraph:
    slots = space.tunable_slots(graph)
    vertices = []
    for v in graph.vertices:
        params = dict(v.params)
        for vid, pname in slots:
            if vid == v.id:
                params[pname] = _sample_param(space, v.component, pname, rng)
        vertices.append(Vertex(v.id, v.component, params, v.loop_count))
    return AlgorithmGraph(graph.encoding, tuple(vertices), graph.edges, graph.entry)


def sample_graph(space: DesignSpace, rng) -> AlgorithmGraph:
    """Draw one uniform random valid graph from the space."""
    if space.fixed_topology is not None:
        return _resample_tunables(space, space.fixed_topology, rng)
    n_pathways = int(rng.integers(1, space.max_pathways + 1))
    total_search = int(rng.integers(n_pathways, space.max_search_vertices + 1))
    lengths = [1] * n_pathways
    for _ in range(total_search - n_pathways):
        lengths[rng.integers(n_pathways)] += 1

    vertices = []
    edges = []
    choose = _pick(space, Role.CHOOSE, rng)
    vertices.append(Vertex(0, choose, _sample_params(space, choose, rng)))
    vid = 1
    update_id = 1 + total_search
    for length in lengths:
        prev = 0
        for _ in range(length):
            name = _pick(space, Role.SEARCH, rng)
            vertices.append(Vertex(vid, name, _sample_params(space, name, rng)))
            edges.append((prev, vid))
            prev = vid
            vid += 1
        edges.append((prev, update_id))
    upd = _pick(space, Role.UPDATE, rng)
    vertices.append(Vertex(update_id, upd, _sample_params(space, upd, rng)))
    vid = update_id + 1
    if space.allowed.get(Role.ARCHIVE) and rng.random() < ARCHIVE_PROBABILITY:
        name = _pick(space, Role.ARCHIVE, rng)
        vertices.append(Vertex(vid, name, _sample_params(space, name, rng)))
        edges.append((update_id, vid))
    graph = AlgorithmGraph(space.encoding, tuple(vertices), tuple(edges), entry=0)
    require_valid(graph, space)
    return graph


def initialize_designs(space: DesignSpace, n: int, rng) -> list:
    """n independent uniform samples (or parameter resamples of the fixed
    topology when one is set)."""
    return [sample_graph(space, rng) for _ in range(n)]


# ---------------------------------------------------------------------------
# disturb: one local move on the graph
# ---------------------------------------------------------------------------


def _renumber(vertices, edges, entry):
    old_ids = [v.id for v in vertices]
    remap = {old: new for new, old in enumerate(old_ids)}
    vs = tuple(Vertex(remap[v.id], v.component, dict(v.params), v.loop_count) for v in vertices)
    es = tuple((remap[f], remap[t]) for f, t in edges)
    return vs, es, remap[entry]


def _move_replace_component(graph, space, rng):
    v = graph.vertices[rng.integers(len(graph.vertices))]
    role = v.role
    options = [
        name
        for name in space.allowed.get(role, ())
        if name != v.component
        and (role is not Role.SEARCH or component(name).supports(space.encoding))
    ]
    if not options:
        return None
    name = options[rng.integers(len(options))]
    new_v = Vertex(v.id, name, _sample_params(space, name, rng), v.loop_count)
    vertices = tuple(new_v if u.id == v.id else u for u in graph.vertices)
    return AlgorithmGraph(graph.encoding, vertices, graph.edges, graph.entry)


def _move_insert_search(graph, space, rng):
    if len(graph.search_vertices) >= space.max_search_vertices:
        return None
    update = graph.update_vertex
    flow_edges = [
        (f, t)
        for f, t in graph.edges
        if graph.vertex(f).role in (Role.CHOOSE, Role.SEARCH)
        and (t == update.id or graph.vertex(t).role is Role.SEARCH)
    ]
    f, t = flow_edges[rng.integers(len(flow_edges))]
    new_id = max(v.id for v in graph.vertices) + 1
    name = _pick(space, Role.SEARCH, rng)
    vertices = graph.vertices + (Vertex(new_id, name, _sample_params(space, name, rng)),)
    edges = tuple(e for e in graph.edges if e != (f, t)) + ((f, new_id), (new_id, t))
    vs, es, entry = _renumber(vertices, edges, graph.entry)
    return AlgorithmGraph(graph.encoding, vs, es, entry)


def _move_delete_search(graph, space, rng):
    update = graph.update_vertex
    removable = []
    for s in graph.search_vertices:
        pred = graph.predecessors(s.id)[0]
        succs = graph.successors(s.id)
        if graph.vertex(pred).role is Role.CHOOSE and update.id in succs:
            continue  # would leave an empty pathway
        removable.append(s)
    if not removable:
        return None
    s = removable[rng.integers(len(removable))]
    pred = graph.predecessors(s.id)[0]
    succs = graph.successors(s.id)
    vertices = tuple(v for v in graph.vertices if v.id != s.id)
    edges = [e for e in graph.edges if s.id not in e]
    for t in succs:
        if (pred, t) not in edges:
            edges.append((pred, t))
    vs, es, entry = _renumber(vertices, tuple(edges), graph.entry)
    return AlgorithmGraph(graph.encoding, vs, es, entry)


def _move_add_pathway(graph, space, rng):
    if graph.pathway_count >= space.max_pathways:
        return None
    if len(graph.search_vertices) >= space.max_search_vertices:
        return None
    update = graph.update_vertex
    new_id = max(v.id for v in graph.vertices) + 1
    name = _pick(space, Role.SEARCH, rng)
    vertices = graph.vertices + (Vertex(new_id, name, _sample_params(space, name, rng)),)
    edges = graph.edges + ((graph.entry, new_id), (new_id, update.id))
    vs, es, entry = _renumber(vertices, edges, graph.entry)
    return AlgorithmGraph(graph.encoding, vs, es, entry)


def _move_remove_pathway(graph, space, rng):
    if graph.pathway_count < 2:
        return None
    update = graph.update_vertex
    leaves = [f for f, t in graph.edges if t == update.id]
    leaf = leaves[rng.integers(len(leaves))]
    # walk back removing vertices that fed only this branch
    doomed = set()
    cur = leaf
    while True:
        v = graph.vertex(cur)
        if v.role is not Role.SEARCH:
            break
        others = [t for t in graph.successors(cur) if t != update.id and t not in doomed]
        if others:
            break
        doomed.add(cur)
        cur = graph.predecessors(cur)[0]
    if not doomed:
        return None
    vertices = tuple(v for v in graph.vertices if v.id not in doomed)
    edges = tuple((f, t) for f, t in graph.edges if f not in doomed and t not in doomed)
    vs, es, entry = _renumber(vertices, edges, graph.entry)
    return AlgorithmGraph(graph.encoding, vs, es, entry)


def _move_loop_count(graph, space, rng):
    searches = graph.search_vertices
    target = searches[rng.integers(len(searches))]
    options = [c for c in (target.loop_count - 1, target.loop_count + 1) if 1 <= c <= 5]
    new_count = options[rng.integers(len(options))]
    new_v = Vertex(target.id, target.component, dict(target.params), new_count)
    vertices = tuple(new_v if u.id == target.id else u for u in graph.vertices)
    return AlgorithmGraph(graph.encoding, vertices, graph.edges, graph.entry)


def _move_resample_param(graph, space, rng):
    slots = space.tunable_slots(graph)
    if not slots:
        return None
    vid, pname = slots[rng.integers(len(slots))]
    v = graph.vertex(vid)
    params = dict(v.params)
    params[pname] = _sample_param(space, v.component, pname, rng)
    new_v = Vertex(v.id, v.component, params, v.loop_count)
    vertices = tuple(new_v if u.id == vid else u for u in graph.vertices)
    return AlgorithmGraph(graph.encoding, vertices, graph.edges, graph.entry)


_TOPOLOGY_MOVES = (
    _move_replace_component,
    _move_insert_search,
    _move_delete_search,
    _move_add_pathway,
    _move_remove_pathway,
    _move_loop_count,
    _move_resample_param,
)


def disturb(graph: AlgorithmGraph, space: DesignSpace, rng, strength: int = 1) -> AlgorithmGraph:
    """Apply ``strength`` independent local moves; the result always
    validates.  With a fixed topology only hyperparameters move; when no
    structural move applies the fallback is a parameter resample."""
    out = graph
    for _ in range(max(int(strength), 1)):
        if space.fixed_topology is not None:
            moved = _move_resample_param(out, space, rng)
            out = moved if moved is not None else out
            continue
        moves = list(_TOPOLOGY_MOVES)
        applied = None
        while moves and applied is None:
            i = int(rng.integers(len(moves)))
            applied = moves.pop(i)(out, space, rng)
        if applied is None:
            applied = _move_resample_param(out, space, rng)
        out = applied if applied is not None else out
    require_valid(out, space)
    return out


# ---------------------------------------------------------------------------
# hyperparameter tuning
# ---------------------------------------------------------------------------


def _slot_codec(graph: AlgorithmGraph, slots):
    specs = [component(graph.vertex(vid).component).param(pname) for vid, pname in slots]

    def encode():
        u = []
        for (vid, pname), p in zip(slots, specs):
            val = float(graph.vertex(vid).params[pname])
            if p.log_scale and p.lower > 0:
                u.append((math.log(val) - math.log(p.lower)) / (math.log(p.upper) - math.log(p.lower)))
            else:
                u.append((val - p.lower) / (p.upper - p.lower) if p.upper > p.lower else 0.0)
        return np.array(u)

    def decode(u_vec):
        values = {}
        for u, (vid, pname), p in zip(np.clip(u_vec, 0.0, 1.0), slots, specs):
            if p.log_scale and p.lower > 0:
                val = math.exp(math.log(p.lower) + u * (math.log(p.upper) - math.log(p.lower)))
            else:
                val = p.lower + u * (p.upper - p.lower)
            values[(vid, pname)] = p.coerce(val)
        vertices = []
        for v in graph.vertices:
            params = dict(v.params)
            for (vid, pname), val in values.items():
                if vid == v.id:
                    params[pname] = val
            vertices.append(Vertex(v.id, v.component, params, v.loop_count))
        return AlgorithmGraph(graph.encoding, tuple(vertices), graph.edges, graph.entry)

    return encode, decode


def tune_hyperparams(graph: AlgorithmGraph, plan: EvalPlan, budget: int, rng,
                     slots=None, score_fn=None) -> AlgorithmGraph:
    """Tune the graph's numeric hyperparameters over [0, 1]^d with a small
    CMA-ES run; each sampled vector costs one aggregate evaluation (scored
    with a single repetition per instance to keep tuning cheap)."""
    if slots is None:
        slots = [
            (v.id, p.name) for v in graph.vertices for p in component(v.component).params
        ]
    if not slots or budget <= 0:
        return graph
    encode, decode = _slot_codec(graph, slots)

    if score_fn is None:
        tuning_plan = replace(plan, reps_per_instance=1, method="exhaustive")

        def score_fn(g):
            return evaluate_exhaustive([g], tuning_plan)[0].aggregate

    best_u, _, _ = minimize(
        lambda u: score_fn(decode(u)),
        encode(),
        sigma0=0.3,
        budget=budget,
        rng=rng,
        popsize=default_popsize(len(slots)),
        clip01=True,
    )
    return decode(best_u)


# ---------------------------------------------------------------------------
# selection and the loop
# ---------------------------------------------------------------------------


def select_designs(current: list, challengers: list, n: int | None = None) -> list:
    """Keep the best aggregates from current + challengers; ties prefer
    fewer vertices, then earlier position (so an equal challenger only
    displaces its parent by being simpler)."""
    union = list(current) + list(challengers)
    if not union:
        raise ValueError("selection over zero candidates")
    n = n if n is not None else len(current)
    order = sorted(
        range(len(union)),
        key=lambda i: (union[i][1].aggregate, len(union[i][0].vertices), i),
    )
    return [union[i] for i in order[:n]]


@dataclass
class DesignConfig:
    """Design-loop parameters; training instances live in ``plan``."""

    space: DesignSpace
    plan: EvalPlan
    test_instances: list
    n_candidates: int = 4
    n_iterations: int = 50
    cmaes_budget: int = 20
    master_seed: int = 0

    def __post_init__(self):
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be at least 1")
        train_ids = {i.instance_id for i in self.plan.instances}
        test_ids = {i.instance_id for i in self.test_instances}
        if train_ids & test_ids:
            raise ValueError(f"training and test instances overlap: {train_ids & test_ids}")


@dataclass
class DesignState:
    incumbents: list = field(default_factory=list)  # (graph, CandidateScore)
    history: list = field(default_factory=list)     # surrogate memory
    convergence: list = field(default_factory=list)  # (iteration, best aggregate)


@dataclass
class DesignReport:
    finalists: list            # (graph, training CandidateScore, test CandidateScore)
    convergence: list          # (iteration, best aggregate)
    eval_log: list             # evaluation-log rows
    total_runs: int
    topology_changes: int
    state: DesignState

    @property
    def best(self):
        return self.finalists[0]


def design(config: DesignConfig, progress=None) -> DesignReport:
    """Run the full design loop and test the finalists.

    Deterministic for a fixed master seed: the seed drives both the design
    moves and the per-cell solve seeds (the plan's solve seed is overridden
    with it).
    """
    rng = np.random.default_rng([int(config.master_seed), 0x9E3779B9])
    plan = replace(
        config.plan, solve_config=replace(config.plan.solve_config, seed=config.master_seed)
    )
    state = DesignState()
    eval_log = []
    log_offset = 0
    total_runs = 0
    topology_changes = 0

    def book(scores):
        nonlocal log_offset, total_runs
        for row in evaluation_log_rows(scores):
            eval_log.append((row[0] + log_offset,) + row[1:])
        log_offset += len(scores)
        total_runs += sum(s.evaluations_spent for s in scores)

    graphs = initialize_designs(config.space, config.n_candidates, rng)
    scores = evaluate_with_method(graphs, plan, state.history)
    book(scores)
    usable = [
        (g, s) for g, s in zip(graphs, scores) if not (s.eliminated or s.rejected)
    ] or list(zip(graphs, scores))
    state.incumbents = select_designs([], usable, n=config.n_candidates)

    def best_entry():
        return min(state.incumbents, key=lambda e: e[1].aggregate)

    best_agg = best_entry()[1].aggregate
    state.convergence.append((0, best_agg))
    stagnation = 0

    for it in range(1, config.n_iterations + 1):
        strength = 1 if stagnation < STAGNATION_WINDOW else 2
        challengers = [disturb(g, config.space, rng, strength) for g, _ in state.incumbents]
        parents = [g for g, _ in state.incumbents]
        if it % TUNE_EVERY == 0:
            best_graph = best_entry()[0]
            tuned = tune_hyperparams(
                best_graph,
                plan,
                config.cmaes_budget,
                rng,
                slots=config.space.tunable_slots(best_graph),
            )
            total_runs += config.cmaes_budget * len(plan.instances)
            challengers.append(tuned)
            parents.append(best_graph)

        for parent, child in zip(parents, challengers):
            if not same_topology(parent, child):
                topology_changes += 1

        ch_scores = evaluate_with_method(
            challengers, plan, state.history, incumbent=best_entry()[1]
        )
        book(ch_scores)
        usable = [
            (g, s) for g, s in zip(challengers, ch_scores) if not (s.eliminated or s.rejected)
        ]
        state.incumbents = select_designs(state.incumbents, usable, n=config.n_candidates)

        new_best = best_entry()[1].aggregate
        if new_best < best_agg:
            best_agg = new_best
            stagnation = 0
        else:
            stagnation += 1
        state.convergence.append((it, best_agg))
        if progress is not None:
            progress(it, best_agg, total_runs)

    test_plan = replace(plan, instances=list(config.test_instances), method="exhaustive")
    final_graphs = [g for g, _ in state.incumbents]
    test_scores = evaluate_exhaustive(final_graphs, test_plan)
    total_runs += sum(s.evaluations_spent for s in test_scores)
    finalists = sorted(
        [
            (g, s, t)
            for (g, s), t in zip(state.incumbents, test_scores)
        ],
        key=lambda e: e[1].aggregate,
    )
    return DesignReport(finalists, state.convergence, eval_log, total_runs, topology_changes, state)
