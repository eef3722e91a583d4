"""Registry of all component implementations, keyed by catalog name."""
from __future__ import annotations

from ..catalog import CATALOG, Role
from ..errors import UnknownComponent
from .archives import ARCHIVE_OPS, ArchiveState, tabu_keys
from .choose import CHOOSE_OPS
from .continuous import CONTINUOUS_OPS
from .crossover import CROSSOVER_OPS
from .discrete import DISCRETE_OPS
from .model_based import MODEL_OPS
from .permutation import PERMUTATION_OPS
from .update import UPDATE_OPS

SEARCH_OPS = {**CROSSOVER_OPS, **CONTINUOUS_OPS, **MODEL_OPS, **DISCRETE_OPS, **PERMUTATION_OPS}

_BY_ROLE = {
    Role.CHOOSE: CHOOSE_OPS,
    Role.SEARCH: SEARCH_OPS,
    Role.UPDATE: UPDATE_OPS,
    Role.ARCHIVE: ARCHIVE_OPS,
}


def get_operator(name: str):
    spec = CATALOG.get(name)
    if spec is None:
        raise UnknownComponent(f"unknown component {name!r}")
    table = _BY_ROLE[spec.role]
    try:
        return table[name]
    except KeyError:
        raise UnknownComponent(f"component {name!r} has no implementation") from None


def _missing_implementations() -> list:
    return [name for name in CATALOG if name not in _BY_ROLE[CATALOG[name].role]]


__all__ = [
    "ARCHIVE_OPS",
    "ArchiveState",
    "CHOOSE_OPS",
    "SEARCH_OPS",
    "UPDATE_OPS",
    "get_operator",
    "tabu_keys",
]
