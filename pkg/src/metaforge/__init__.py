"""Automated design of metaheuristic optimizers.

Algorithms are directed graphs over a typed component catalog; a design
loop evolves graph topologies and tunes their hyperparameters against
training instances of a target problem, scored by configurable objectives
under evaluation-saving methods; an executor interprets any valid graph
to solve problem instances.
"""

from .catalog import CATALOG, ComponentSpec, ParamSpec, Role, registry_json
from .cmaes import CmaEs
from .design import (
    DesignConfig,
    DesignReport,
    design,
    disturb,
    initialize_designs,
    sample_graph,
    select_designs,
    tune_hyperparams,
)
from .encodings import (
    ContinuousSpec,
    DiscreteSpec,
    Encoding,
    PermutationSpec,
    make_continuous,
    make_discrete,
)
from .evaluation import (
    CandidateScore,
    EvalPlan,
    evaluate_approximate,
    evaluate_exhaustive,
    evaluate_intensification,
    evaluate_racing,
    score_auc,
    score_quality,
    score_runtime_fe,
)
from .execution import SolveConfig, SolveRecord, make_baseline, solve
from .graphs import (
    AlgorithmGraph,
    DesignSpace,
    Vertex,
    build_chain,
    build_default_space,
    deserialize_graph,
    graph_fingerprint,
    render_pseudocode,
    serialize_graph,
    validate_graph,
)
from .population import Population
from .problems import (
    InstanceRole,
    ProblemInstance,
    evaluate_benchmark,
    make_knapsack,
    make_onemax,
    make_rastrigin,
    make_rosenbrock,
    make_sphere,
    make_tsp,
    penalized_fitness,
)
from .problems.beamforming import (
    BeamformingInstance,
    beamforming_fitness,
    make_beamforming_instances,
    sequential_beamforming,
    sum_rate,
)

__version__ = "0.1.0"

__all__ = [
    "AlgorithmGraph",
    "BeamformingInstance",
    "CATALOG",
    "CandidateScore",
    "CmaEs",
    "ComponentSpec",
    "ContinuousSpec",
    "DesignConfig",
    "DesignReport",
    "DesignSpace",
    "DiscreteSpec",
    "Encoding",
    "EvalPlan",
    "InstanceRole",
    "ParamSpec",
    "PermutationSpec",
    "Population",
    "ProblemInstance",
    "Role",
    "SolveConfig",
    "SolveRecord",
    "Vertex",
    "beamforming_fitness",
    "build_chain",
    "build_default_space",
    "design",
    "deserialize_graph",
    "disturb",
    "evaluate_approximate",
    "evaluate_benchmark",
    "evaluate_exhaustive",
    "evaluate_intensification",
    "evaluate_racing",
    "graph_fingerprint",
    "initialize_designs",
    "make_baseline",
    "make_beamforming_instances",
    "make_continuous",
    "make_discrete",
    "make_knapsack",
    "make_onemax",
    "make_rastrigin",
    "make_rosenbrock",
    "make_sphere",
    "make_tsp",
    "penalized_fitness",
    "registry_json",
    "render_pseudocode",
    "sample_graph",
    "score_auc",
    "score_quality",
    "score_runtime_fe",
    "select_designs",
    "sequential_beamforming",
    "serialize_graph",
    "solve",
    "sum_rate",
    "tune_hyperparams",
    "validate_graph",
]
