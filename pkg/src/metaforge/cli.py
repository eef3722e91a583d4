"""Command line: batch design and solve runs.

Two subcommands mirror the two run modes.  ``design`` searches the design
space for algorithms fitted to the configured training instances and
writes the finalists (JSON + pseudocode), the convergence curve, and the
evaluation log into the output directory.  ``solve`` runs one algorithm
(a designed JSON file or a named baseline) on one instance for a number
of repetitions and writes per-repetition trajectories plus a summary.

Values come from flags first, then a JSON config file with flat dotted
keys (``--config run.json``), then defaults.  Unknown config keys are
rejected.  Every delimited output gets a rendered PNG companion.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .design import DesignConfig, design
from .errors import MetaforgeError, UsageError
from .evaluation import METHODS, OBJECTIVES, EvalPlan, cell_seed
from .execution import SolveConfig, make_baseline, solve
from .graphs import (
    build_default_space,
    deserialize_graph,
    render_pseudocode,
    serialize_graph,
)
from .problems import template  # noqa: F401  (registers the reference problem)
from .problems.registry import REGISTRY, make_instances
from .reporting import (
    format_mean_std,
    render_convergence,
    render_trajectories,
    write_convergence,
    write_csv,
    write_evaluation_log,
    write_trajectory,
)

OUTPUT_ENV_VAR = "METAFORGE_OUTPUT"

_DEFAULTS = {
    "train_instances": 4,
    "test_instances": 2,
    "objective": "quality",
    "method": "exhaustive",
    "reps": 3,
    "threshold": None,
    "targets": None,
    "pop_size": 50,
    "max_fe": 10_000,
    "granularity": None,
    "threads": 1,
    "candidates": 4,
    "iterations": 50,
    "cmaes_budget": 20,
    "seed": 0,
    "max_search": 3,
    "max_pathways": 2,
    "fixed_topology": None,
    "tunable": None,
    "algorithm": None,
    "baseline": None,
    "output": None,
    "problem": None,
}

_PROBLEM_KEYS = ("dim", "n", "n_list", "bits", "users", "antennas", "power", "noise", "seed")


@dataclass
class RunConfig:
    """Everything one run needs, resolved from flags, file, and defaults."""

    mode: str
    problem: str
    problem_params: dict = field(default_factory=dict)
    train_instances: int = 4
    test_instances: int = 2
    objective: str = "quality"
    method: str = "exhaustive"
    reps: int = 3
    threshold: float | None = None
    targets: list | None = None
    pop_size: int = 50
    max_fe: int = 10_000
    granularity: int | None = None
    threads: int = 1
    candidates: int = 4
    iterations: int = 50
    cmaes_budget: int = 20
    seed: int = 0
    max_search: int = 3
    max_pathways: int = 2
    fixed_topology: str | None = None
    tunable: list | None = None
    algorithm: str | None = None
    baseline: str | None = None
    output: str | None = None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metaforge",
        description="design metaheuristic optimizers for a problem, or solve it with one",
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file with flat dotted keys")
        p.add_argument("--problem", help=f"problem factory name ({', '.join(sorted(REGISTRY))})")
        p.add_argument("--dim", type=int, help="problem dimension / item count")
        p.add_argument("--n", help="surface element count, or comma list of per-instance sizes")
        p.add_argument("--bits", type=int, help="phase bits per surface element")
        p.add_argument("--users", type=int, help="number of served users")
        p.add_argument("--antennas", type=int, help="transmit antennas")
        p.add_argument("--power", type=float, help="transmit power budget")
        p.add_argument("--noise", type=float, help="noise power")
        p.add_argument("--instance-seed", type=int, dest="instance_seed",
                       help="seed for instance generation")
        p.add_argument("--pop-size", type=int, dest="pop_size", help="population size per run")
        p.add_argument("--max-fe", type=int, dest="max_fe", help="evaluation budget per run")
        p.add_argument("--granularity", type=int, help="trajectory recording step in FEs")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--threads", type=int, help="worker cap for evaluation cells")
        p.add_argument("--output", "-o", help=f"output directory (default ${OUTPUT_ENV_VAR})")

    d = sub.add_parser("design", help="design algorithms for the target problem")
    common(d)
    d.add_argument("--objective", choices=OBJECTIVES, help="design objective")
    d.add_argument("--method", choices=METHODS, help="evaluation method")
    d.add_argument("--reps", type=int, help="repetitions per (candidate, instance)")
    d.add_argument("--threshold", type=float, help="fitness threshold for runtime objectives")
    d.add_argument("--targets", help="comma list of fitness targets for the anytime objective")
    d.add_argument("--train-instances", type=int, dest="train_instances",
                   help="number of training instances")
    d.add_argument("--test-instances", type=int, dest="test_instances",
                   help="number of held-out test instances")
    d.add_argument("--candidates", type=int, help="number of concurrent designs")
    d.add_argument("--iterations", type=int, help="design-loop iterations")
    d.add_argument("--cmaes-budget", type=int, dest="cmaes_budget",
                   help="aggregate evaluations per tuning call")
    d.add_argument("--max-search", type=int, dest="max_search", help="cap on search vertices")
    d.add_argument("--max-pathways", type=int, dest="max_pathways", help="cap on parallel pathways")
    d.add_argument("--fixed-topology", dest="fixed_topology",
                   help="algorithm JSON whose topology is frozen (hyperparameter mode)")
    d.add_argument("--tunable", help="comma list of tunable vertex:param slots, e.g. 2:rate")

    s = sub.add_parser("solve", help="solve the target problem with an algorithm")
    common(s)
    s.add_argument("--algorithm", help="algorithm JSON file to load")
    s.add_argument("--baseline", help="baseline name: GA, ILS, SA, or RS")
    s.add_argument("--reps", type=int, help="independent repetitions")
    return parser


def _load_config_file(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"config file {path!r} not found; check the --config path") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"config file {path!r} is not valid JSON ({e.msg}); fix line {e.lineno}") from None
    if not isinstance(doc, dict):
        raise UsageError(f"config file {path!r} must hold a JSON object of dotted keys")
    known = set(_DEFAULTS) | {"mode", "train_instances", "test_instances"}
    known |= {f"problem.{k}" for k in _PROBLEM_KEYS}
    for key in doc:
        if key not in known:
            raise UsageError(
                f"unknown config key {key!r}; remove it or use one of the documented keys"
            )
    return doc


def _parse_n(value, problem_params):
    text = str(value)
    if "," in text:
        problem_params["n_list"] = [int(x) for x in text.split(",") if x.strip()]
    else:
        problem_params["n"] = int(text)


def parse_config(argv) -> RunConfig:
    """Resolve argv (+ optional config file) into a checked RunConfig."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        if e.code not in (0, None):
            raise UsageError("invalid command line; run with --help for the flag list") from None
        raise
    file_cfg = _load_config_file(args.config) if args.config else {}

    def pick(name, flag_value):
        if flag_value is not None:
            return flag_value
        if name in file_cfg:
            return file_cfg[name]
        return _DEFAULTS.get(name)

    problem_params = {}
    for key in _PROBLEM_KEYS:
        fv = getattr(args, key, None) if key != "seed" else getattr(args, "instance_seed", None)
        value = fv if fv is not None else file_cfg.get(f"problem.{key}")
        if value is not None:
            if key == "n":
                _parse_n(value, problem_params)
            else:
                problem_params[key] = value

    problem = pick("problem", args.problem)
    if not problem:
        raise UsageError("missing problem name; pass e.g. --problem onemax")
    if problem not in REGISTRY:
        raise UsageError(
            f"unknown problem {problem!r}; pick one of {', '.join(sorted(REGISTRY))}"
        )

    targets = pick("targets", getattr(args, "targets", None))
    if isinstance(targets, str):
        targets = [float(x) for x in targets.split(",") if x.strip()]

    tunable = pick("tunable", getattr(args, "tunable", None))
    if isinstance(tunable, str):
        parsed = []
        for item in tunable.split(","):
            if not item.strip():
                continue
            try:
                vid, pname = item.split(":")
                parsed.append((int(vid), pname.strip()))
            except ValueError:
                raise UsageError(
                    f"bad --tunable entry {item!r}; use vertex:param, e.g. 2:rate"
                ) from None
        tunable = parsed

    cfg = RunConfig(
        mode=args.mode,
        problem=problem,
        problem_params=problem_params,
        train_instances=int(pick("train_instances", getattr(args, "train_instances", None))),
        test_instances=int(pick("test_instances", getattr(args, "test_instances", None))),
        objective=pick("objective", getattr(args, "objective", None)),
        method=pick("method", getattr(args, "method", None)),
        reps=int(pick("reps", getattr(args, "reps", None))),
        threshold=pick("threshold", getattr(args, "threshold", None)),
        targets=targets,
        pop_size=int(pick("pop_size", args.pop_size)),
        max_fe=int(pick("max_fe", args.max_fe)),
        granularity=pick("granularity", args.granularity),
        threads=int(pick("threads", args.threads)),
        candidates=int(pick("candidates", getattr(args, "candidates", None))),
        iterations=int(pick("iterations", getattr(args, "iterations", None))),
        cmaes_budget=int(pick("cmaes_budget", getattr(args, "cmaes_budget", None))),
        seed=int(pick("seed", args.seed)),
        max_search=int(pick("max_search", getattr(args, "max_search", None))),
        max_pathways=int(pick("max_pathways", getattr(args, "max_pathways", None))),
        fixed_topology=pick("fixed_topology", getattr(args, "fixed_topology", None)),
        tunable=tunable,
        algorithm=pick("algorithm", getattr(args, "algorithm", None)),
        baseline=pick("baseline", getattr(args, "baseline", None)),
        output=pick("output", args.output),
    )

    if cfg.mode == "solve":
        if bool(cfg.algorithm) == bool(cfg.baseline):
            raise UsageError(
                "solve needs exactly one of --algorithm FILE or --baseline NAME"
            )
    if cfg.mode == "design" and cfg.train_instances < 1:
        raise UsageError("design needs a non-empty training set; raise --train-instances")
    if cfg.objective in ("runtimeFE", "runtimeSec") and cfg.threshold is None:
        raise UsageError(f"objective {cfg.objective} needs --threshold VALUE")
    return cfg


# ---------------------------------------------------------------------------
# run modes
# ---------------------------------------------------------------------------


class _OutputTracker:
    """Record written files so a failed run leaves no partial output."""

    def __init__(self, directory: str | None):
        base = directory or os.environ.get(OUTPUT_ENV_VAR) or "metaforge_out"
        self.dir = Path(base)
        self.created_dir = not self.dir.exists()
        self.dir.mkdir(parents=True, exist_ok=True)
        self.paths = []

    def path(self, name: str) -> Path:
        p = self.dir / name
        self.paths.append(p)
        return p

    def cleanup(self):
        for p in self.paths:
            try:
                p.unlink(missing_ok=True)
            except OSError:
                pass
        if self.created_dir:
            try:
                self.dir.rmdir()
            except OSError:
                pass


def _build_plan_and_instances(cfg: RunConfig):
    train, test = make_instances(cfg.problem, cfg.problem_params, cfg.train_instances,
                                 cfg.test_instances)
    solve_config = SolveConfig(
        population_size=cfg.pop_size,
        max_fe=cfg.max_fe,
        seed=cfg.seed,
        record_granularity=cfg.granularity,
    )
    plan = EvalPlan(
        objective=cfg.objective,
        method=cfg.method,
        instances=train,
        solve_config=solve_config,
        reps_per_instance=cfg.reps,
        threshold=cfg.threshold,
        targets=cfg.targets,
        threads=cfg.threads,
    )
    return plan, train, test


def run_design(cfg: RunConfig) -> int:
    out = _OutputTracker(cfg.output)
    try:
        plan, train, test = _build_plan_and_instances(cfg)
        encoding = train[0].encoding
        space = build_default_space(
            encoding, max_search_vertices=cfg.max_search, max_pathways=cfg.max_pathways
        )
        if cfg.fixed_topology:
            space.fixed_topology = deserialize_graph(Path(cfg.fixed_topology).read_bytes())
            if cfg.tunable:
                space.tunable_params = set(cfg.tunable)
        dconf = DesignConfig(
            space=space,
            plan=plan,
            test_instances=test,
            n_candidates=cfg.candidates,
            n_iterations=cfg.iterations,
            cmaes_budget=cfg.cmaes_budget,
            master_seed=cfg.seed,
        )

        def progress(it, best, runs):
            print(f"iter {it}/{cfg.iterations}  best={best:.6g}  runs={runs}")

        report = design(dconf, progress=progress)

        best_graph = report.best[0]
        out.path("best.json").write_bytes(serialize_graph(best_graph))
        out.path("best.txt").write_text(render_pseudocode(best_graph) + "\n")
        for i, (g, _, _) in enumerate(report.finalists):
            out.path(f"finalist_{i}.json").write_bytes(serialize_graph(g))
            out.path(f"finalist_{i}.txt").write_text(render_pseudocode(g) + "\n")
        write_convergence(out.path("convergence.csv"), report.convergence)
        render_convergence(out.path("convergence.png"), report.convergence)
        write_evaluation_log(out.path("evaluation_log.csv"), report.eval_log)
        summary_rows = [
            (i, len(g.vertices), s.aggregate, t.aggregate)
            for i, (g, s, t) in enumerate(report.finalists)
        ]
        write_csv(
            out.path("summary.csv"),
            ["finalist", "vertices", "train_aggregate", "test_aggregate"],
            summary_rows,
        )
        print(f"designed {len(report.finalists)} finalists; outputs in {out.dir}")
        print(f"best training aggregate {report.finalists[0][1].aggregate:.6g}, "
              f"test aggregate {report.finalists[0][2].aggregate:.6g}")
        return 0
    except MetaforgeError as e:
        out.cleanup()
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        out.cleanup()
        print(f"error: {e}", file=sys.stderr)
        return 1


def run_solve(cfg: RunConfig) -> int:
    out = _OutputTracker(cfg.output)
    try:
        plan, train, _ = _build_plan_and_instances(cfg)
        instance = train[0]
        if cfg.algorithm:
            graph = deserialize_graph(Path(cfg.algorithm).read_bytes())
        else:
            graph = make_baseline(cfg.baseline, instance.encoding)
        print(render_pseudocode(graph))

        records = []
        for rep in range(cfg.reps):
            run_cfg = SolveConfig(
                population_size=cfg.pop_size,
                max_fe=cfg.max_fe,
                seed=cell_seed(cfg.seed, graph, instance.instance_id, rep),
                record_granularity=cfg.granularity,
            )
            records.append(solve(graph, instance, run_cfg))

        for rep, record in enumerate(records):
            write_trajectory(out.path(f"trajectory_rep{rep}.csv"), record.trajectory)
        render_trajectories(
            out.path("trajectories.png"), [r.trajectory for r in records]
        )
        finals = [r.best_fitness for r in records]
        summary = format_mean_std(finals)
        write_csv(
            out.path("summary.csv"),
            ["instance", "reps", "mean_std", "best", "worst"],
            [(instance.instance_id, cfg.reps, summary, min(finals), max(finals))],
        )
        print(f"{instance.instance_id}: {summary} over {cfg.reps} reps; outputs in {out.dir}")
        return 0
    except MetaforgeError as e:
        out.cleanup()
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        out.cleanup()
        print(f"error: {e}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    argv = argv if argv is not None else sys.argv[1:]
    try:
        cfg = parse_config(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    if cfg.mode == "design":
        return run_design(cfg)
    return run_solve(cfg)


if __name__ == "__main__":
    sys.exit(main())
