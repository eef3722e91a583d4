"""Solution encodings: continuous boxes, bounded integer vectors, permutations."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import EncodingMismatch


class Encoding(Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"
    PERMUTATION = "permutation"


@dataclass(frozen=True)
class ContinuousSpec:
    """Real vector with per-dimension box bounds."""

    lower: np.ndarray
    upper: np.ndarray

    @property
    def encoding(self) -> Encoding:
        return Encoding.CONTINUOUS

    @property
    def dim(self) -> int:
        return len(self.lower)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lower, self.upper, size=(n, self.dim))

    def clip(self, genomes: np.ndarray) -> np.ndarray:
        return np.clip(genomes, self.lower, self.upper)

    def contains(self, genomes: np.ndarray) -> bool:
        return bool(np.all(genomes >= self.lower) and np.all(genomes <= self.upper))


@dataclass(frozen=True)
class DiscreteSpec:
    """Integer vector; entry i takes values in [0, cardinalities[i])."""

    cardinalities: np.ndarray

    @property
    def encoding(self) -> Encoding:
        return Encoding.DISCRETE

    @property
    def dim(self) -> int:
        return len(self.cardinalities)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, self.cardinalities, size=(n, self.dim), dtype=np.int64)

    def clip(self, genomes: np.ndarray) -> np.ndarray:
        return np.clip(genomes, 0, self.cardinalities - 1)

    def contains(self, genomes: np.ndarray) -> bool:
        return bool(np.all(genomes >= 0) and np.all(genomes < self.cardinalities))


@dataclass(frozen=True)
class PermutationSpec:
    """Permutation of 0..length-1."""

    length: int

    @property
    def encoding(self) -> Encoding:
        return Encoding.PERMUTATION

    @property
    def dim(self) -> int:
        return self.length

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return np.stack([rng.permutation(self.length) for _ in range(n)]).astype(np.int64)

    def clip(self, genomes: np.ndarray) -> np.ndarray:
        return genomes

    def contains(self, genomes: np.ndarray) -> bool:
        expect = np.arange(self.length)
        return bool(np.all(np.sort(genomes, axis=-1) == expect))


EncodingSpec = ContinuousSpec | DiscreteSpec | PermutationSpec


def make_continuous(dim: int, lower, upper) -> ContinuousSpec:
    lo = np.broadcast_to(np.asarray(lower, dtype=float), (dim,)).copy()
    hi = np.broadcast_to(np.asarray(upper, dtype=float), (dim,)).copy()
    lo.setflags(write=False)
    hi.setflags(write=False)
    return ContinuousSpec(lo, hi)


def make_discrete(dim: int, cardinality) -> DiscreteSpec:
    cards = np.broadcast_to(np.asarray(cardinality, dtype=np.int64), (dim,)).copy()
    cards.setflags(write=False)
    return DiscreteSpec(cards)


def require_encoding(spec: EncodingSpec, encoding: Encoding, what: str) -> None:
    if spec.encoding is not encoding:
        raise EncodingMismatch(
            f"{what} requires {encoding.value} genomes, got {spec.encoding.value}"
        )
