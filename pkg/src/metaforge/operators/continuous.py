"""Mutation operators on real vectors.

Step sizes (``sigma``, ``scale``) are fractions of each dimension's bound
range rather than absolute values, so the same hyperparameter means the
same thing on every problem.  All offspring are clipped to the bounds.
"""
from __future__ import annotations

import numpy as np

from ..encodings import Encoding, require_encoding


def search_mu_gaussian(genomes, fitness, spec, params, state, rng):
    require_encoding(spec, Encoding.CONTINUOUS, "gaussian mutation")
    sigma = float(params.get("sigma", 0.1)) * (spec.upper - spec.lower)
    out = genomes + sigma * rng.standard_normal(genomes.shape)
    return spec.clip(out)


def search_mu_cauchy(genomes, fitness, spec, params, state, rng):
    require_encoding(spec, Encoding.CONTINUOUS, "cauchy mutation")
    scale = float(params.get("scale", 0.1)) * (spec.upper - spec.lower)
    out = genomes + scale * rng.standard_cauchy(genomes.shape)
    return spec.clip(out)


def search_mu_uniform(genomes, fitness, spec, params, state, rng):
    require_encoding(spec, Encoding.CONTINUOUS, "uniform mutation")
    rate = float(params.get("rate", 0.1))
    mask = rng.random(genomes.shape) < rate
    draws = rng.uniform(spec.lower, spec.upper, size=genomes.shape)
    return np.where(mask, draws, genomes)


def search_mu_polynomial(genomes, fitness, spec, params, state, rng):
    """Bounded polynomial mutation; larger eta keeps children closer."""
    require_encoding(spec, Encoding.CONTINUOUS, "polynomial mutation")
    eta = float(params.get("eta", 20.0))
    rate = float(params.get("rate", 0.1))
    lo, hi = spec.lower, spec.upper
    span = hi - lo
    x = genomes.astype(float, copy=True)
    mask = rng.random(x.shape) < rate
    u = rng.random(x.shape)
    d1 = (x - lo) / span
    d2 = (hi - x) / span
    low_side = u < 0.5
    dq = np.where(
        low_side,
        (2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (eta + 1.0)) ** (1.0 / (eta + 1.0)) - 1.0,
        1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2) ** (eta + 1.0)) ** (1.0 / (eta + 1.0)),
    )
    x = np.where(mask, x + dq * span, x)
    return spec.clip(x)


def reinit_continuous(genomes, fitness, spec, params, state, rng):
    require_encoding(spec, Encoding.CONTINUOUS, "continuous reinitialization")
    return spec.sample(len(genomes), rng)


CONTINUOUS_OPS = {
    "search_mu_gaussian": search_mu_gaussian,
    "search_mu_cauchy": search_mu_cauchy,
    "search_mu_uniform": search_mu_uniform,
    "search_mu_polynomial": search_mu_polynomial,
    "reinit_continuous": reinit_continuous,
}
