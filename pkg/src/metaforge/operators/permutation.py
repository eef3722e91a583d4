"""Neighborhood moves on permutations; every output stays a bijection."""
from __future__ import annotations

from ..encodings import Encoding, require_encoding


def _two_distinct(dim, rng):
    i = rng.integers(dim)
    j = rng.integers(dim)
    while j == i:
        j = rng.integers(dim)
    return i, j


def search_swap(genomes, fitness, spec, params, state, rng):
    """Swap two distinct positions; offspring differ in exactly two slots."""
    require_encoding(spec, Encoding.PERMUTATION, "swap move")
    out = genomes.copy()
    dim = out.shape[1]
    for row in out:
        if dim < 2:
            continue
        i, j = _two_distinct(dim, rng)
        row[i], row[j] = row[j], row[i]
    return out


def search_swap_multi(genomes, fitness, spec, params, state, rng):
    """Swap every facing pair between two indices, i.e. reverse the segment."""
    require_encoding(spec, Encoding.PERMUTATION, "segment swap move")
    out = genomes.copy()
    dim = out.shape[1]
    for row in out:
        if dim < 2:
            continue
        i, j = sorted(_two_distinct(dim, rng))
        row[i : j + 1] = row[i : j + 1][::-1]
    return out


def search_scramble(genomes, fitness, spec, params, state, rng):
    require_encoding(spec, Encoding.PERMUTATION, "scramble move")
    out = genomes.copy()
    dim = out.shape[1]
    for row in out:
        if dim < 2:
            continue
        i, j = sorted(_two_distinct(dim, rng))
        seg = row[i : j + 1].copy()
        rng.shuffle(seg)
        row[i : j + 1] = seg
    return out


def search_insert(genomes, fitness, spec, params, state, rng):
    """Move one entity to the slot right after another randomly picked one."""
    require_encoding(spec, Encoding.PERMUTATION, "insert move")
    out = genomes.copy()
    dim = out.shape[1]
    for idx in range(len(out)):
        if dim < 2:
            continue
        a, b = _two_distinct(dim, rng)
        row = list(out[idx])
        moved = row.pop(b)
        anchor = row.index(out[idx][a])
        row.insert(anchor + 1, moved)
        out[idx] = row
    return out


def reinit_permutation(genomes, fitness, spec, params, state, rng):
    require_encoding(spec, Encoding.PERMUTATION, "permutation reinitialization")
    return spec.sample(len(genomes), rng)


PERMUTATION_OPS = {
    "search_swap": search_swap,
    "search_swap_multi": search_swap_multi,
    "search_scramble": search_scramble,
    "search_insert": search_insert,
    "reinit_permutation": reinit_permutation,
}
