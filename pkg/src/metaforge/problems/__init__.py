"""Problem plugin interface, penalty handling, and built-in benchmarks.

A problem instance bundles an encoding spec with a deterministic
``evaluate`` function returning ``(raw_fitness, violation)`` under the
minimization convention.  Constraint violations are folded into the
fitness as ``raw + coefficient * violation``, so any feasible solution
outranks any infeasible one as long as raw magnitudes stay below the
coefficient times the smallest violation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from ..encodings import (
    DiscreteSpec,
    Encoding,
    EncodingSpec,
    PermutationSpec,
    make_continuous,
    make_discrete,
)
from ..errors import EncodingMismatch, UnknownProblem

DEFAULT_PENALTY_COEFF = 1e6


class InstanceRole(Enum):
    TRAINING = "training"
    TEST = "test"


def penalized_fitness(raw: float, violation: float, coeff: float = DEFAULT_PENALTY_COEFF) -> float:
    """Discount infeasible solutions by their violation amount."""
    if violation < 0:
        raise ValueError("violation must be non-negative")
    if coeff <= 0:
        raise ValueError("penalty coefficient must be positive")
    return float(raw) + coeff * float(violation)


@dataclass
class ProblemInstance:
    """One instance of the target problem: encoding plus evaluator."""

    spec: EncodingSpec
    evaluate: Callable
    instance_id: str
    role: InstanceRole = InstanceRole.TRAINING
    penalty_coeff: float = DEFAULT_PENALTY_COEFF
    evaluate_batch: Callable | None = field(default=None)

    @property
    def encoding(self) -> Encoding:
        return self.spec.encoding

    def evaluate_many(self, genomes: np.ndarray):
        """Vectorized evaluation when the problem provides it, else a loop."""
        if self.evaluate_batch is not None:
            raw, viol = self.evaluate_batch(genomes)
            return np.asarray(raw, dtype=float), np.asarray(viol, dtype=float)
        raw = np.empty(len(genomes))
        viol = np.empty(len(genomes))
        for i, g in enumerate(genomes):
            raw[i], viol[i] = self.evaluate(g)
        return raw, viol


# ---------------------------------------------------------------------------
# continuous benchmarks
# ---------------------------------------------------------------------------


def make_sphere(dim: int, role=InstanceRole.TRAINING, instance_id=None) -> ProblemInstance:
    spec = make_continuous(dim, -5.12, 5.12)

    def ev(x):
        return float(np.sum(np.square(x))), 0.0

    def ev_batch(xs):
        return np.sum(np.square(xs), axis=1), np.zeros(len(xs))

    return ProblemInstance(spec, ev, instance_id or f"sphere-d{dim}", role, evaluate_batch=ev_batch)


def make_rastrigin(dim: int, role=InstanceRole.TRAINING, instance_id=None) -> ProblemInstance:
    spec = make_continuous(dim, -5.12, 5.12)

    def ev(x):
        x = np.asarray(x, dtype=float)
        return float(10 * dim + np.sum(x**2 - 10 * np.cos(2 * np.pi * x))), 0.0

    def ev_batch(xs):
        xs = np.asarray(xs, dtype=float)
        return 10 * dim + np.sum(xs**2 - 10 * np.cos(2 * np.pi * xs), axis=1), np.zeros(len(xs))

    return ProblemInstance(spec, ev, instance_id or f"rastrigin-d{dim}", role, evaluate_batch=ev_batch)


def make_rosenbrock(dim: int, role=InstanceRole.TRAINING, instance_id=None) -> ProblemInstance:
    spec = make_continuous(dim, -2.048, 2.048)

    def ev(x):
        x = np.asarray(x, dtype=float)
        return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2)), 0.0

    def ev_batch(xs):
        xs = np.asarray(xs, dtype=float)
        raw = np.sum(100.0 * (xs[:, 1:] - xs[:, :-1] ** 2) ** 2 + (1.0 - xs[:, :-1]) ** 2, axis=1)
        return raw, np.zeros(len(xs))

    return ProblemInstance(spec, ev, instance_id or f"rosenbrock-d{dim}", role, evaluate_batch=ev_batch)


# ---------------------------------------------------------------------------
# discrete benchmarks
# ---------------------------------------------------------------------------


def make_onemax(dim: int, role=InstanceRole.TRAINING, instance_id=None) -> ProblemInstance:
    """Maximize the number of ones; raw fitness is its negation."""
    spec = make_discrete(dim, 2)

    def ev(x):
        return -float(np.sum(x)), 0.0

    def ev_batch(xs):
        return -np.sum(xs, axis=1).astype(float), np.zeros(len(xs))

    return ProblemInstance(spec, ev, instance_id or f"onemax-d{dim}", role, evaluate_batch=ev_batch)


def make_knapsack(n_items: int, seed: int = 0, role=InstanceRole.TRAINING,
                  instance_id=None) -> ProblemInstance:
    """0/1 knapsack; violation is the overweight amount."""
    rng = np.random.default_rng(seed)
    values = rng.uniform(1.0, 10.0, size=n_items)
    weights = rng.uniform(1.0, 10.0, size=n_items)
    capacity = 0.5 * float(weights.sum())
    spec = make_discrete(n_items, 2)

    def ev(x):
        x = np.asarray(x)
        value = float(values @ x)
        weight = float(weights @ x)
        return -value, max(0.0, weight - capacity)

    def ev_batch(xs):
        xs = np.asarray(xs, dtype=float)
        value = xs @ values
        weight = xs @ weights
        return -value, np.maximum(0.0, weight - capacity)

    return ProblemInstance(
        spec, ev, instance_id or f"knapsack-n{n_items}-s{seed}", role, evaluate_batch=ev_batch
    )


# ---------------------------------------------------------------------------
# permutation benchmark
# ---------------------------------------------------------------------------


def make_tsp(coords=None, n_cities: int = 10, seed: int = 0, role=InstanceRole.TRAINING,
             instance_id=None) -> ProblemInstance:
    """Symmetric closed-tour length from city coordinates."""
    if coords is None:
        rng = np.random.default_rng(seed)
        coords = rng.uniform(0.0, 1.0, size=(n_cities, 2))
    coords = np.asarray(coords, dtype=float)
    n = len(coords)
    dist = np.linalg.norm(coords[:, None, :] - coords[None, :, :], axis=2)
    spec = PermutationSpec(n)

    def ev(tour):
        tour = np.asarray(tour)
        return float(dist[tour, np.roll(tour, -1)].sum()), 0.0

    def ev_batch(tours):
        tours = np.asarray(tours)
        return dist[tours, np.roll(tours, -1, axis=1)].sum(axis=1).astype(float), np.zeros(len(tours))

    return ProblemInstance(spec, ev, instance_id or f"tsp-n{n}-s{seed}", role, evaluate_batch=ev_batch)


BENCHMARKS = {
    "sphere": make_sphere,
    "rastrigin": make_rastrigin,
    "rosenbrock": make_rosenbrock,
    "onemax": make_onemax,
    "knapsack": make_knapsack,
    "tsp": make_tsp,
}


def evaluate_benchmark(name: str, genome):
    """Evaluate one genome on a named benchmark sized to the genome."""
    genome = np.asarray(genome)
    if name not in BENCHMARKS:
        raise UnknownProblem(f"unknown benchmark {name!r}")
    if name in ("sphere", "rastrigin", "rosenbrock"):
        if not np.issubdtype(genome.dtype, np.floating):
            raise EncodingMismatch(f"{name} needs a real vector")
        inst = BENCHMARKS[name](dim=len(genome))
    elif name in ("onemax", "knapsack"):
        if not np.issubdtype(genome.dtype, np.integer):
            raise EncodingMismatch(f"{name} needs an integer vector")
        inst = BENCHMARKS[name](len(genome))
    else:
        inst = make_tsp(n_cities=len(genome))
        if not inst.spec.contains(genome.reshape(1, -1)):
            raise EncodingMismatch("tsp needs a permutation of 0..n-1")
    if isinstance(inst.spec, DiscreteSpec) and not inst.spec.contains(genome.reshape(1, -1)):
        raise EncodingMismatch(f"genome outside {name}'s value range")
    return inst.evaluate(genome)
