"""Reference template for plugging a custom problem into the framework.

Copy this module, fill in the three marked sections, and import it before
parsing your run config; the problem then works in both the design and
solve modes under the name you register.

A problem must provide:

1. an encoding spec -- one of ``ContinuousSpec`` (real vector with box
   bounds), ``DiscreteSpec`` (integer vector with per-entry value counts),
   or ``PermutationSpec`` (orderings of 0..L-1);
2. a deterministic ``evaluate(genome) -> (raw_fitness, violation)`` under
   the minimization convention, with ``violation == 0`` exactly when the
   solution is feasible (violations are added to the fitness scaled by the
   instance's penalty coefficient);
3. a factory that builds training and test instance lists from the run
   config's problem block.
"""
from __future__ import annotations

import numpy as np

from ..encodings import make_discrete
from . import InstanceRole, ProblemInstance
from .registry import register_problem


def _make_example_instance(dim: int, target_seed: int, role: InstanceRole) -> ProblemInstance:
    # 1. encoding: integer vector, 4 values per entry
    spec = make_discrete(dim, 4)
    target = np.random.default_rng(target_seed).integers(0, 4, size=dim)

    # 2. evaluator: distance to a hidden target, no constraints
    def evaluate(genome):
        return float(np.sum(genome != target)), 0.0

    return ProblemInstance(
        spec,
        evaluate,
        instance_id=f"match-d{dim}-s{target_seed}",
        role=role,
    )


def _match_factory(cfg: dict, n_train: int, n_test: int):
    # 3. factory: one hidden target per instance, seeds derived from cfg
    dim = int(cfg.get("dim", 20))
    seed = int(cfg.get("seed", 0))
    train = [_make_example_instance(dim, seed + i, InstanceRole.TRAINING) for i in range(n_train)]
    test = [
        _make_example_instance(dim, seed + n_train + i, InstanceRole.TEST) for i in range(n_test)
    ]
    return train, test


register_problem("match", _match_factory)
