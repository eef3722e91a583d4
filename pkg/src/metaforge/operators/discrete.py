"""Neighborhood moves on bounded integer vectors."""
from __future__ import annotations

import numpy as np

from ..encodings import Encoding, require_encoding


def search_reset_one(genomes, fitness, spec, params, state, rng):
    """Reset one randomly picked entity per solution to a different value."""
    require_encoding(spec, Encoding.DISCRETE, "single-entity reset")
    out = genomes.copy()
    n, dim = out.shape
    cols = rng.integers(0, dim, size=n)
    cards = spec.cardinalities[cols]
    movable = cards >= 2
    shifts = rng.integers(1, np.maximum(cards, 2))
    rows = np.arange(n)[movable]
    out[rows, cols[movable]] = (out[rows, cols[movable]] + shifts[movable]) % cards[movable]
    return out


def search_reset_rand(genomes, fitness, spec, params, state, rng):
    """Reset each entity to a uniformly random value with a probability."""
    require_encoding(spec, Encoding.DISCRETE, "random reset")
    rate = float(params.get("rate", 0.1))
    mask = rng.random(genomes.shape) < rate
    draws = rng.integers(0, spec.cardinalities, size=genomes.shape, dtype=np.int64)
    return np.where(mask, draws, genomes)


def search_reset_creep(genomes, fitness, spec, params, state, rng):
    """Nudge each entity by a small signed step with a probability; clamps
    at the value range ends (meant for ordinal attributes)."""
    require_encoding(spec, Encoding.DISCRETE, "creep reset")
    rate = float(params.get("rate", 0.1))
    step = max(int(params.get("step", 1)), 1)
    mask = rng.random(genomes.shape) < rate
    magnitude = rng.integers(1, step + 1, size=genomes.shape)
    sign = rng.choice(np.array([-1, 1]), size=genomes.shape)
    moved = genomes + mask * sign * magnitude
    return spec.clip(moved)


def reinit_discrete(genomes, fitness, spec, params, state, rng):
    require_encoding(spec, Encoding.DISCRETE, "discrete reinitialization")
    return spec.sample(len(genomes), rng)


DISCRETE_OPS = {
    "search_reset_one": search_reset_one,
    "search_reset_rand": search_reset_rand,
    "search_reset_creep": search_reset_creep,
    "reinit_discrete": reinit_discrete,
}
