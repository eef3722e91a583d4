"""Recombination operators.

Parents are consumed in consecutive pairs and each pair yields two
children in place, so the batch size never changes.  Point and uniform
variants work on real or integer vectors; order variants only on
permutations.
"""
from __future__ import annotations

import numpy as np

from ..encodings import ContinuousSpec, Encoding, require_encoding
from ..errors import EncodingMismatch, OddParentCount


def _pairs(genomes: np.ndarray):
    if len(genomes) % 2 != 0:
        raise OddParentCount(f"pairwise crossover needs an even batch, got {len(genomes)}")
    return genomes.reshape(len(genomes) // 2, 2, -1)


def _no_permutation(spec, what):
    if spec.encoding is Encoding.PERMUTATION:
        raise EncodingMismatch(f"{what} does not apply to permutations")


def _clip(spec, genomes):
    if isinstance(spec, ContinuousSpec):
        return spec.clip(genomes)
    return genomes


def _swap_masked(out: np.ndarray, mask: np.ndarray) -> np.ndarray:
    a = out[:, 0, :].copy()
    out[:, 0, :] = np.where(mask, out[:, 1, :], out[:, 0, :])
    out[:, 1, :] = np.where(mask, a, out[:, 1, :])
    return out


def cross_point_one(genomes, fitness, spec, params, state, rng):
    _no_permutation(spec, "one-point crossover")
    out = _pairs(genomes.copy())
    dim = out.shape[-1]
    if dim < 2:
        return out.reshape(genomes.shape)
    cuts = rng.integers(1, dim, size=len(out))
    mask = np.arange(dim)[None, :] >= cuts[:, None]
    return _swap_masked(out, mask).reshape(genomes.shape)


def cross_point_two(genomes, fitness, spec, params, state, rng):
    _no_permutation(spec, "two-point crossover")
    return _cross_point_k(genomes, spec, 2, rng)


def cross_point_n(genomes, fitness, spec, params, state, rng):
    _no_permutation(spec, "n-point crossover")
    return _cross_point_k(genomes, spec, int(params.get("n", 2)), rng)


def _cut_points(n_pairs: int, dim: int, k: int, rng) -> np.ndarray:
    """k distinct cut positions in 1..dim-1 per pair (random-key subsets)."""
    if k < dim - 1:
        keys = rng.random((n_pairs, dim - 1))
        return np.argpartition(keys, k - 1, axis=1)[:, :k] + 1
    return np.broadcast_to(np.arange(1, dim), (n_pairs, dim - 1)).copy()


def _cross_point_k(genomes, spec, n_points, rng):
    out = _pairs(genomes.copy())
    dim = out.shape[-1]
    if dim < 2:
        return out.reshape(genomes.shape)
    k = min(max(int(n_points), 1), dim - 1)
    cuts = _cut_points(len(out), dim, k, rng)
    marks = np.zeros((len(out), dim), dtype=np.int64)
    np.put_along_axis(marks, cuts, 1, axis=1)
    mask = (np.cumsum(marks, axis=1) % 2) == 1  # segments after odd cuts swap
    return _swap_masked(out, mask).reshape(genomes.shape)


def cross_point_uniform(genomes, fitness, spec, params, state, rng):
    _no_permutation(spec, "uniform crossover")
    rate = float(params.get("rate", 0.5))
    out = _pairs(genomes.copy())
    mask = rng.random(out[:, 0, :].shape) < rate
    a = out[:, 0, :].copy()
    out[:, 0, :][mask] = out[:, 1, :][mask]
    out[:, 1, :][mask] = a[mask]
    return out.reshape(genomes.shape)


def cross_arithmetic(genomes, fitness, spec, params, state, rng):
    require_encoding(spec, Encoding.CONTINUOUS, "arithmetic crossover")
    out = _pairs(genomes.astype(float, copy=True))
    lam = rng.random(len(out))[:, None]
    p0 = out[:, 0, :].copy()
    p1 = out[:, 1, :].copy()
    out[:, 0, :] = lam * p0 + (1.0 - lam) * p1
    out[:, 1, :] = lam * p1 + (1.0 - lam) * p0
    return _clip(spec, out.reshape(genomes.shape))


def cross_sim_binary(genomes, fitness, spec, params, state, rng):
    """Simulated binary crossover; child pairs sum to their parent pairs
    before boundary clipping."""
    require_encoding(spec, Encoding.CONTINUOUS, "simulated binary crossover")
    eta = float(params.get("eta", 20.0))
    out = _pairs(genomes.astype(float, copy=True))
    u = rng.random(out[:, 0, :].shape)
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)),
        (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0)),
    )
    p0 = out[:, 0, :].copy()
    p1 = out[:, 1, :].copy()
    out[:, 0, :] = 0.5 * ((1.0 + beta) * p0 + (1.0 - beta) * p1)
    out[:, 1, :] = 0.5 * ((1.0 - beta) * p0 + (1.0 + beta) * p1)
    return _clip(spec, out.reshape(genomes.shape))


def _order_fill(keep_mask: np.ndarray, donor: np.ndarray, child: np.ndarray):
    # positions not kept are filled with the donor's order of the missing values
    kept = set(child[keep_mask].tolist())
    fill = [v for v in donor if v not in kept]
    child[~keep_mask] = fill


def cross_order_two(genomes, fitness, spec, params, state, rng):
    require_encoding(spec, Encoding.PERMUTATION, "order crossover")
    return _cross_order_k(genomes, spec, 2, rng)


def cross_order_n(genomes, fitness, spec, params, state, rng):
    require_encoding(spec, Encoding.PERMUTATION, "order crossover")
    return _cross_order_k(genomes, spec, int(params.get("n", 2)), rng)


def _cross_order_k(genomes, spec, n_points, rng):
    """Keep alternating segments from one parent, fill the rest in the
    other parent's visiting order."""
    out = _pairs(genomes.copy())
    dim = out.shape[-1]
    k = min(max(int(n_points), 1), max(dim - 1, 1))
    for pair in out:
        if dim < 2:
            continue
        cuts = np.sort(rng.choice(np.arange(1, dim), size=k, replace=False))
        keep = np.zeros(dim, dtype=bool)
        on = True
        prev = 0
        for c in list(cuts) + [dim]:
            keep[prev:c] = on
            on = not on
            prev = c
        p0 = pair[0].copy()
        p1 = pair[1].copy()
        c0 = p0.copy()
        _order_fill(keep, p1, c0)
        c1 = p1.copy()
        _order_fill(keep, p0, c1)
        pair[0] = c0
        pair[1] = c1
    return out.reshape(genomes.shape)


CROSSOVER_OPS = {
    "cross_point_one": cross_point_one,
    "cross_point_two": cross_point_two,
    "cross_point_n": cross_point_n,
    "cross_point_uniform": cross_point_uniform,
    "cross_arithmetic": cross_arithmetic,
    "cross_sim_binary": cross_sim_binary,
    "cross_order_two": cross_order_two,
    "cross_order_n": cross_order_n,
}
