"""Design objectives and evaluation-saving methods for scoring candidates.

Scores follow one convention: lower aggregate is better.  The anytime
objective (fraction of target/budget-checkpoint pairs attained) is stored
negated to fit it.  Unreached runtime thresholds are censored at ten times
the budget, the usual penalized-average-runtime rule.

Every (candidate, instance, repetition) cell derives its own RNG seed from
the plan seed, a content hash of the candidate graph, the instance id, and
the repetition index, so results are reproducible regardless of evaluation
order or thread count, and identical candidates always receive identical
scores.
"""
from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from .catalog import CATALOG
from .errors import EmptyTargets, TooFewCandidates
from .execution import SolveConfig, SolveRecord, solve
from .graphs import AlgorithmGraph, graph_fingerprint

OBJECTIVES = ("quality", "runtimeFE", "runtimeSec", "auc")
METHODS = ("exhaustive", "racing", "intensification", "approximate")

RACING_MIN_INSTANCES = 4
RACING_ALPHA = 0.05
SURROGATE_MIN_HISTORY = 10
SURROGATE_NEIGHBORS = 3
SURROGATE_EXACT_FRACTION = 0.3
AUC_CHECKPOINTS = 51


@dataclass
class EvalPlan:
    """What to score (objective), how (method), and on which instances."""

    objective: str
    method: str
    instances: list
    solve_config: SolveConfig
    reps_per_instance: int = 3
    threshold: float | None = None
    targets: list | None = None
    threads: int = 1

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.reps_per_instance < 1:
            raise ValueError("reps_per_instance must be at least 1")
        needs_threshold = self.objective in ("runtimeFE", "runtimeSec")
        if needs_threshold and self.threshold is None:
            raise ValueError(f"objective {self.objective} requires a threshold")
        if not needs_threshold and self.threshold is not None:
            raise ValueError(f"objective {self.objective} does not take a threshold")


@dataclass
class CellResult:
    instance_id: str
    rep: int
    score: float
    censored: bool = False
    surrogate: bool = False


@dataclass
class CandidateScore:
    """Aggregated objective value of one candidate over instances x reps."""

    candidate: int
    cells: list = field(default_factory=list)
    eliminated: bool = False
    rejected: bool = False
    evaluations_spent: int = 0

    @property
    def aggregate(self) -> float:
        if not self.cells:
            return math.inf
        return float(np.mean([c.score for c in self.cells]))

    def mean_over(self, instance_ids) -> float:
        vals = [c.score for c in self.cells if c.instance_id in instance_ids]
        return float(np.mean(vals)) if vals else math.inf


# ---------------------------------------------------------------------------
# objectives
# ---------------------------------------------------------------------------


def score_quality(record: SolveRecord) -> float:
    """Final best penalized fitness of the trajectory."""
    return float(record.trajectory[-1][1])


def score_runtime_fe(record: SolveRecord, threshold: float, budget: int):
    """First FE count whose best fitness reaches the threshold; censored at
    10x budget when never reached."""
    for fe, fit in record.trajectory:
        if fit <= threshold:
            return float(fe), False
    return 10.0 * budget, True


def score_runtime_sec(record: SolveRecord, threshold: float):
    """Wall-clock analogue of the FE runtime objective (not reproducible)."""
    for (fe, fit), t in zip(record.trajectory, record.trajectory_times):
        if fit <= threshold:
            return float(t), False
    return 10.0 * record.elapsed_seconds, True


def auc_checkpoints(config: SolveConfig) -> np.ndarray:
    pts = np.geomspace(config.population_size, config.max_fe, AUC_CHECKPOINTS)
    return np.unique(np.round(pts)).astype(int)


def score_auc(record: SolveRecord, targets, budget_checkpoints) -> float:
    """Fraction of (target, budget checkpoint) pairs attained, in [0, 1];
    higher is better."""
    targets = np.asarray(list(targets), dtype=float)
    if targets.size == 0 or not np.all(np.isfinite(targets)):
        raise EmptyTargets("anytime scoring needs a non-empty list of finite targets")
    fes = np.array([fe for fe, _ in record.trajectory])
    fits = np.array([f for _, f in record.trajectory])
    hit = 0
    checkpoints = np.asarray(budget_checkpoints)
    for c in checkpoints:
        k = np.searchsorted(fes, c, side="right") - 1
        best_at_c = fits[k] if k >= 0 else math.inf
        hit += int(np.sum(best_at_c <= targets))
    return hit / (len(checkpoints) * len(targets))


def default_targets(records_on_instance: list, count: int = AUC_CHECKPOINTS) -> np.ndarray:
    """Targets spanning the pool's initial best down to its best-known value
    on one instance (geometric when the sign allows, else linear)."""
    starts = [r.trajectory[0][1] for r in records_on_instance]
    finals = [r.trajectory[-1][1] for r in records_on_instance]
    hi = float(np.max(starts))
    lo = float(np.min(finals))
    if lo == hi:
        return np.array([lo])
    if lo > 0 and hi > 0:
        return np.geomspace(hi, lo, count)
    return np.linspace(hi, lo, count)


# ---------------------------------------------------------------------------
# cell execution
# ---------------------------------------------------------------------------


def _instance_token(instance_id: str) -> int:
    return int.from_bytes(hashlib.blake2b(instance_id.encode(), digest_size=8).digest(), "big") >> 1


def cell_seed(plan_seed: int, graph: AlgorithmGraph, instance_id: str, rep: int) -> int:
    ss = np.random.SeedSequence(
        [int(plan_seed), graph_fingerprint(graph), _instance_token(instance_id), int(rep)]
    )
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def run_cell(graph: AlgorithmGraph, instance, plan: EvalPlan, rep: int) -> SolveRecord:
    cfg = replace(
        plan.solve_config,
        seed=cell_seed(plan.solve_config.seed, graph, instance.instance_id, rep),
    )
    return solve(graph, instance, cfg)


def _run_cells(tasks, plan: EvalPlan):
    """Run (graph, instance, rep) tasks, optionally on a thread pool; the
    result order always matches the task order."""
    if plan.threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=plan.threads) as pool:
            return list(pool.map(lambda t: run_cell(t[0], t[1], plan, t[2]), tasks))
    return [run_cell(g, inst, plan, rep) for g, inst, rep in tasks]


class _Scorer:
    """Turn solve records into objective scores; anytime targets default to
    per-instance values computed from the whole run pool."""

    def __init__(self, plan: EvalPlan):
        self.plan = plan
        self.checkpoints = auc_checkpoints(plan.solve_config)
        self._instance_targets: dict = {}

    def prime_targets(self, instance_id: str, records: list):
        if self.plan.objective != "auc" or self.plan.targets is not None:
            return
        if instance_id not in self._instance_targets:
            self._instance_targets[instance_id] = default_targets(records)

    def score(self, record: SolveRecord, instance_id: str):
        plan = self.plan
        if plan.objective == "quality":
            return score_quality(record), False
        if plan.objective == "runtimeFE":
            return score_runtime_fe(record, plan.threshold, plan.solve_config.max_fe)
        if plan.objective == "runtimeSec":
            return score_runtime_sec(record, plan.threshold)
        targets = plan.targets
        if targets is None:
            targets = self._instance_targets[instance_id]
        return -score_auc(record, targets, self.checkpoints), False


# ---------------------------------------------------------------------------
# exhaustive
# ---------------------------------------------------------------------------


def evaluate_exhaustive(candidates: list, plan: EvalPlan) -> list:
    """Run every candidate on every training instance for every repetition."""
    scorer = _Scorer(plan)
    scores = [CandidateScore(i) for i in range(len(candidates))]
    for instance in plan.instances:
        tasks = [
            (g, instance, rep)
            for g in candidates
            for rep in range(plan.reps_per_instance)
        ]
        records = _run_cells(tasks, plan)
        scorer.prime_targets(instance.instance_id, records)
        k = 0
        for ci, g in enumerate(candidates):
            for rep in range(plan.reps_per_instance):
                value, censored = scorer.score(records[k], instance.instance_id)
                scores[ci].cells.append(CellResult(instance.instance_id, rep, value, censored))
                scores[ci].evaluations_spent += 1
                k += 1
    return scores


# ---------------------------------------------------------------------------
# racing
# ---------------------------------------------------------------------------


def _friedman_elimination(score_matrix: np.ndarray, alpha: float = RACING_ALPHA) -> np.ndarray:
    """Rank-based race test: returns a boolean mask of candidates that are
    significantly worse than the rank-best one.

    ``score_matrix`` is (instances, candidates), lower is better.  Uses the
    Iman-Davenport F form of the Friedman test, then the classic rank-sum
    critical-difference post-hoc against the best-ranked candidate.
    """
    n, k = score_matrix.shape
    if n < 2 or k < 2:
        return np.zeros(k, dtype=bool)
    ranks = np.apply_along_axis(stats.rankdata, 1, score_matrix)
    r = ranks.sum(axis=0)
    denom = np.sum((ranks - (k + 1) / 2.0) ** 2)
    if denom <= 1e-12:  # all candidates tied on every instance
        return np.zeros(k, dtype=bool)
    t_stat = (k - 1) * np.sum((r - n * (k + 1) / 2.0) ** 2) / denom
    if t_stat >= n * (k - 1) - 1e-9:
        # perfectly consistent rankings: anything ranked above the best loses
        return r > r.min()
    f_stat = (n - 1) * t_stat / (n * (k - 1) - t_stat)
    if f_stat <= stats.f.ppf(1 - alpha, k - 1, (n - 1) * (k - 1)):
        return np.zeros(k, dtype=bool)
    variance = (
        2.0 * n * (1.0 - t_stat / (n * (k - 1)))
        * (np.sum(ranks**2) - n * k * (k + 1) ** 2 / 4.0)
        / ((n - 1) * (k - 1))
    )
    cd = stats.t.ppf(1 - alpha, (n - 1) * (k - 1)) * math.sqrt(max(variance, 0.0))
    return (r - r.min()) > cd


def evaluate_racing(candidates: list, plan: EvalPlan) -> list:
    """Process instances in order, dropping candidates that a rank test
    declares significantly worse than the front runner."""
    if len(candidates) < 2:
        raise TooFewCandidates("racing needs at least two candidates")
    scorer = _Scorer(plan)
    scores = [CandidateScore(i) for i in range(len(candidates))]
    alive = list(range(len(candidates)))
    seen_instances = []
    for inst_idx, instance in enumerate(plan.instances):
        tasks = [
            (candidates[ci], instance, rep)
            for ci in alive
            for rep in range(plan.reps_per_instance)
        ]
        records = _run_cells(tasks, plan)
        scorer.prime_targets(instance.instance_id, records)
        k = 0
        for ci in alive:
            for rep in range(plan.reps_per_instance):
                value, censored = scorer.score(records[k], instance.instance_id)
                scores[ci].cells.append(CellResult(instance.instance_id, rep, value, censored))
                scores[ci].evaluations_spent += 1
                k += 1
        seen_instances.append(instance.instance_id)

        is_last = inst_idx == len(plan.instances) - 1
        if len(seen_instances) >= RACING_MIN_INSTANCES and not is_last and len(alive) > 1:
            matrix = np.array(
                [
                    [scores[ci].mean_over([iid]) for ci in alive]
                    for iid in seen_instances
                ]
            )
            worse = _friedman_elimination(matrix)
            survivors = [ci for j, ci in enumerate(alive) if not worse[j]]
            for j, ci in enumerate(alive):
                if worse[j]:
                    scores[ci].eliminated = True
            alive = survivors
    return scores


# ---------------------------------------------------------------------------
# intensification
# ---------------------------------------------------------------------------


def evaluate_intensification(candidates: list, plan: EvalPlan, incumbent=None) -> list:
    """Challenge an incumbent instance-by-instance; a challenger stops (and
    is flagged rejected) the moment its mean over the shared prefix falls
    behind.  Ties favor the challenger, which then becomes the incumbent.

    With no incumbent, the first candidate is evaluated exhaustively and
    bootstraps the role.
    """
    scorer = _Scorer(plan)
    scores = []
    start = 0
    if incumbent is None:
        first = evaluate_exhaustive(candidates[:1], plan)[0]
        incumbent = first
        scores.append(first)
        start = 1
    inc_order = [iid for iid in dict.fromkeys(c.instance_id for c in incumbent.cells)]
    by_id = {inst.instance_id: inst for inst in plan.instances}
    for offset, graph in enumerate(candidates[start:], start=start):
        cs = CandidateScore(offset)
        prefix = []
        for iid in inc_order:
            instance = by_id[iid]
            records = _run_cells(
                [(graph, instance, rep) for rep in range(plan.reps_per_instance)], plan
            )
            scorer.prime_targets(iid, records)
            for rep, record in enumerate(records):
                value, censored = scorer.score(record, iid)
                cs.cells.append(CellResult(iid, rep, value, censored))
                cs.evaluations_spent += 1
            prefix.append(iid)
            if cs.mean_over(prefix) > incumbent.mean_over(prefix):
                cs.rejected = True
                break
        if not cs.rejected and cs.mean_over(inc_order) <= incumbent.mean_over(inc_order):
            incumbent = cs
        scores.append(cs)
    return scores


# ---------------------------------------------------------------------------
# surrogate
# ---------------------------------------------------------------------------

_FEATURE_COMPONENTS = sorted(CATALOG)
_FEATURE_PARAM_SLOTS = [
    (name, p.name) for name in _FEATURE_COMPONENTS for p in CATALOG[name].params
]


def featurize(graph: AlgorithmGraph) -> np.ndarray:
    """Fixed-slot numeric encoding of a graph: component counts, normalized
    hyperparameter values, vertex/pathway/loop-count summaries."""
    counts = {name: 0.0 for name in _FEATURE_COMPONENTS}
    sums = {slot: 0.0 for slot in _FEATURE_PARAM_SLOTS}
    hits = {slot: 0 for slot in _FEATURE_PARAM_SLOTS}
    for v in graph.vertices:
        counts[v.component] += 1.0
        spec = CATALOG[v.component]
        for p in spec.params:
            if p.name not in v.params:
                continue
            lo, hi = p.lower, p.upper
            val = float(v.params[p.name])
            if p.log_scale and lo > 0:
                u = (math.log(val) - math.log(lo)) / (math.log(hi) - math.log(lo))
            else:
                u = (val - lo) / (hi - lo) if hi > lo else 0.0
            sums[(v.component, p.name)] += u
            hits[(v.component, p.name)] += 1
    param_feats = [
        sums[s] / hits[s] if hits[s] else 0.0 for s in _FEATURE_PARAM_SLOTS
    ]
    loop_total = sum(v.loop_count for v in graph.vertices)
    extras = [
        len(graph.vertices) / 10.0,
        graph.pathway_count / 4.0,
        loop_total / (10.0 * max(len(graph.vertices), 1)),
    ]
    return np.array([counts[n] for n in _FEATURE_COMPONENTS] + param_feats + extras)


def _knn_predict(features: np.ndarray, history_x: np.ndarray, history_y: np.ndarray) -> float:
    d = np.linalg.norm(history_x - features, axis=1)
    order = np.argsort(d, kind="stable")[:SURROGATE_NEIGHBORS]
    nd = d[order]
    if nd[0] < 1e-12:
        exact = order[nd < 1e-12]
        return float(np.mean(history_y[exact]))
    w = 1.0 / nd
    return float(np.sum(w * history_y[order]) / np.sum(w))


def evaluate_approximate(candidates: list, plan: EvalPlan, history: list) -> list:
    """Predict aggregates with a distance-weighted nearest-neighbor model
    over previously exact-evaluated candidates; the predicted-best slice
    gets exact evaluation and extends the history.

    With fewer than ten history entries everything is evaluated exactly
    (documented fallback).  ``history`` holds (feature vector, aggregate)
    pairs and is appended to in place.
    """
    if len(history) < SURROGATE_MIN_HISTORY:
        scores = evaluate_exhaustive(candidates, plan)
        for g, s in zip(candidates, scores):
            history.append((featurize(g), s.aggregate))
        return scores

    hx = np.stack([h[0] for h in history])
    hy = np.array([h[1] for h in history])
    predictions = np.array([_knn_predict(featurize(g), hx, hy) for g in candidates])
    n_exact = max(1, math.ceil(SURROGATE_EXACT_FRACTION * len(candidates)))
    exact_idx = set(np.argsort(predictions, kind="stable")[:n_exact].tolist())

    scores = []
    exact_list = [candidates[i] for i in sorted(exact_idx)]
    exact_scores = iter(evaluate_exhaustive(exact_list, plan))
    for i, g in enumerate(candidates):
        if i in exact_idx:
            s = next(exact_scores)
            s.candidate = i
            history.append((featurize(g), s.aggregate))
        else:
            s = CandidateScore(i)
            s.cells = [CellResult("<surrogate>", 0, float(predictions[i]), False, True)]
        scores.append(s)
    return scores


def evaluate_with_method(candidates: list, plan: EvalPlan, history=None, incumbent=None) -> list:
    """Dispatch on the plan's method; degenerate inputs fall back to
    exhaustive evaluation."""
    if plan.method == "racing" and len(candidates) >= 2:
        return evaluate_racing(candidates, plan)
    if plan.method == "intensification":
        return evaluate_intensification(candidates, plan, incumbent)
    if plan.method == "approximate":
        return evaluate_approximate(candidates, plan, history if history is not None else [])
    return evaluate_exhaustive(candidates, plan)


def evaluation_log_rows(scores: list) -> list:
    """Rows for the evaluation-log CSV: candidate, instance, rep, score,
    censored, surrogate."""
    rows = []
    for s in scores:
        for c in s.cells:
            rows.append((s.candidate, c.instance_id, c.rep, c.score, int(c.censored), int(c.surrogate)))
    return rows
