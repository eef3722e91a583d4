"""Environmental selection: which solutions survive into the next iteration.

Each variant maps the old population's and the offspring batch's fitness
vectors (both length N) to N indices into their concatenation, where index
``i < N`` is old member ``i`` and ``N + i`` is offspring ``i``.
"""
from __future__ import annotations

import numpy as np

from ..errors import SizeMismatch


def _check(old_fit, new_fit):
    if len(old_fit) != len(new_fit):
        raise SizeMismatch(
            f"old population ({len(old_fit)}) and offspring ({len(new_fit)}) sizes differ"
        )
    return len(old_fit)


def update_always(old_fit, new_fit, params, state, rng):
    n = _check(old_fit, new_fit)
    return np.arange(n, 2 * n)


def update_greedy(old_fit, new_fit, params, state, rng):
    n = _check(old_fit, new_fit)
    union = np.concatenate([old_fit, new_fit])
    return np.argsort(union, kind="stable")[:n]


def update_pairwise(old_fit, new_fit, params, state, rng):
    n = _check(old_fit, new_fit)
    take_new = new_fit < old_fit
    return np.where(take_new, np.arange(n) + n, np.arange(n))


def update_round_robin(old_fit, new_fit, params, state, rng):
    """Score every member of the 2N union by wins against q random
    opponents (drawn with replacement, self excluded); the N highest win
    counts survive.  q >= 2N - 1 plays everyone and reduces to exact
    truncation."""
    n = _check(old_fit, new_fit)
    q = max(int(params.get("q", 10)), 1)
    union = np.concatenate([old_fit, new_fit])
    m = len(union)
    if q >= m - 1:
        opponents = np.broadcast_to(np.arange(m - 1), (m, m - 1)).copy()
    else:
        opponents = rng.integers(0, m - 1, size=(m, q))
    opponents = opponents + (opponents >= np.arange(m)[:, None])
    wins = np.sum(union[:, None] < union[opponents], axis=1)
    # most wins first; ties broken by better fitness, then index
    order = np.lexsort((np.arange(m), union, -wins))
    return order[:n]


def update_simulated_annealing(old_fit, new_fit, params, state, rng):
    """Pairwise acceptance that tolerates worse offspring with probability
    exp(-delta / T); T cools geometrically by 0.99 per iteration.

    Temperature is expressed in units of the old population's fitness
    spread, so the same ``t0`` anneals sensibly on any problem scale.
    """
    n = _check(old_fit, new_fit)
    t0 = float(params.get("t0", 1.0))
    k = state.get("cooling_step", 0)
    t = t0 * (0.99**k)
    state["cooling_step"] = k + 1
    scale = float(np.std(np.asarray(old_fit, dtype=float)))
    if not np.isfinite(scale) or scale == 0.0:
        scale = 1.0
    delta = np.asarray(new_fit, dtype=float) - np.asarray(old_fit, dtype=float)
    with np.errstate(over="ignore", divide="ignore"):
        accept_prob = np.where(delta <= 0.0, 1.0, np.exp(-delta / max(t * scale, 1e-300)))
    take_new = rng.random(n) < accept_prob
    return np.where(take_new, np.arange(n) + n, np.arange(n))


UPDATE_OPS = {
    "update_always": update_always,
    "update_greedy": update_greedy,
    "update_pairwise": update_pairwise,
    "update_round_robin": update_round_robin,
    "update_simulated_annealing": update_simulated_annealing,
}
