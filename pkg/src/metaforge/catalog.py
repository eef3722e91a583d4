"""Typed catalog of algorithm components and their hyperparameter schemas.

Every component a graph vertex may reference is listed here with its role,
the encodings it can operate on, and the numeric ranges of its
hyperparameters.  Default design spaces and graph validation both read from
this table; the operator registry mirrors its names one-to-one.

The hyperparameter ranges are this library's own calibration: crossover
rates and per-entity probabilities live in [0, 1], tournament sizes in
[2, 10], cut-point counts in [1, 8] (clamped to genome length - 1 at
execution time), annealing temperatures in [0.01, 100] on a log scale,
creep steps in [1, 3], cluster counts in [2, 10], and archive capacities /
tabu tenures in [1, 50] (clamped to the population size at execution time).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .encodings import Encoding
from .errors import UnknownComponent


class Role(Enum):
    CHOOSE = "choose"
    SEARCH = "search"
    UPDATE = "update"
    ARCHIVE = "archive"


class ParamKind(Enum):
    REAL = "real"
    INTEGER = "integer"


@dataclass(frozen=True)
class ParamSpec:
    """Schema of one component hyperparameter: kind, range, default."""

    name: str
    kind: ParamKind
    lower: float
    upper: float
    default: float
    log_scale: bool = False

    def __post_init__(self):
        if not (self.lower <= self.default <= self.upper):
            raise ValueError(f"default of {self.name} outside [lower, upper]")

    def coerce(self, value: float):
        """Clamp into range and round integer-kind values."""
        v = min(max(float(value), self.lower), self.upper)
        if self.kind is ParamKind.INTEGER:
            return int(round(v))
        return v


ALL_ENCODINGS = frozenset(Encoding)


@dataclass(frozen=True)
class ComponentSpec:
    """One catalog row: name, role, admissible encodings, parameter schemas."""

    name: str
    role: Role
    encodings: frozenset
    params: tuple = ()

    def supports(self, encoding: Encoding) -> bool:
        return encoding in self.encodings

    def param(self, name: str) -> ParamSpec:
        for p in self.params:
            if p.name == name:
                return p
        raise KeyError(name)

    def default_params(self) -> dict:
        return {p.name: p.coerce(p.default) for p in self.params}


def _real(name, lower, upper, default, log_scale=False):
    return ParamSpec(name, ParamKind.REAL, lower, upper, default, log_scale)


def _int(name, lower, upper, default):
    return ParamSpec(name, ParamKind.INTEGER, lower, upper, default)


_C = frozenset({Encoding.CONTINUOUS})
_D = frozenset({Encoding.DISCRETE})
_P = frozenset({Encoding.PERMUTATION})
_CD = frozenset({Encoding.CONTINUOUS, Encoding.DISCRETE})


_COMPONENTS = (
    # -- search: crossovers on real/integer vectors ------------------------
    ComponentSpec("cross_arithmetic", Role.SEARCH, _C),
    ComponentSpec("cross_sim_binary", Role.SEARCH, _C, (_real("eta", 1.0, 50.0, 20.0),)),
    ComponentSpec("cross_point_one", Role.SEARCH, _CD),
    ComponentSpec("cross_point_two", Role.SEARCH, _CD),
    ComponentSpec("cross_point_n", Role.SEARCH, _CD, (_int("n", 1, 8, 2),)),
    ComponentSpec("cross_point_uniform", Role.SEARCH, _CD, (_real("rate", 0.0, 1.0, 0.5),)),
    # -- search: continuous mutation and model-based sampling -------------
    ComponentSpec("search_cma", Role.SEARCH, _C),
    ComponentSpec("search_eda", Role.SEARCH, _C),
    ComponentSpec("search_mu_cauchy", Role.SEARCH, _C, (_real("scale", 0.0, 1.0, 0.1),)),
    ComponentSpec("search_mu_gaussian", Role.SEARCH, _C, (_real("sigma", 0.0, 1.0, 0.1),)),
    ComponentSpec(
        "search_mu_polynomial",
        Role.SEARCH,
        _C,
        (_real("eta", 1.0, 50.0, 20.0), _real("rate", 0.0, 1.0, 0.1)),
    ),
    ComponentSpec("search_mu_uniform", Role.SEARCH, _C, (_real("rate", 0.0, 1.0, 0.1),)),
    ComponentSpec(
        "search_pso",
        Role.SEARCH,
        _C,
        (_real("w", 0.0, 1.0, 0.7), _real("c1", 0.0, 4.0, 1.5), _real("c2", 0.0, 4.0, 1.5)),
    ),
    ComponentSpec(
        "search_de_random",
        Role.SEARCH,
        _C,
        (_real("f", 0.0, 2.0, 0.5), _real("cr", 0.0, 1.0, 0.9)),
    ),
    ComponentSpec(
        "search_de_current",
        Role.SEARCH,
        _C,
        (_real("f", 0.0, 2.0, 0.5), _real("cr", 0.0, 1.0, 0.9)),
    ),
    ComponentSpec(
        "search_de_current_best",
        Role.SEARCH,
        _C,
        (_real("f", 0.0, 2.0, 0.5), _real("cr", 0.0, 1.0, 0.9)),
    ),
    ComponentSpec("reinit_continuous", Role.SEARCH, _C),
    # -- search: integer-vector neighborhoods ------------------------------
    ComponentSpec("search_reset_one", Role.SEARCH, _D),
    ComponentSpec("search_reset_rand", Role.SEARCH, _D, (_real("rate", 0.0, 1.0, 0.1),)),
    ComponentSpec(
        "search_reset_creep",
        Role.SEARCH,
        _D,
        (_real("rate", 0.0, 1.0, 0.1), _int("step", 1, 3, 1)),
    ),
    ComponentSpec("reinit_discrete", Role.SEARCH, _D),
    # -- search: permutation neighborhoods ---------------------------------
    ComponentSpec("cross_order_two", Role.SEARCH, _P),
    ComponentSpec("cross_order_n", Role.SEARCH, _P, (_int("n", 1, 8, 2),)),
    ComponentSpec("search_swap", Role.SEARCH, _P),
    ComponentSpec("search_swap_multi", Role.SEARCH, _P),
    ComponentSpec("search_scramble", Role.SEARCH, _P),
    ComponentSpec("search_insert", Role.SEARCH, _P),
    ComponentSpec("reinit_permutation", Role.SEARCH, _P),
    # -- choose: where to search from --------------------------------------
    ComponentSpec("choose_roulette_wheel", Role.CHOOSE, ALL_ENCODINGS),
    ComponentSpec("choose_tournament", Role.CHOOSE, ALL_ENCODINGS, (_int("k", 2, 10, 2),)),
    ComponentSpec("choose_traverse", Role.CHOOSE, ALL_ENCODINGS),
    ComponentSpec("choose_cluster", Role.CHOOSE, ALL_ENCODINGS, (_int("k", 2, 10, 3),)),
    ComponentSpec("choose_nich", Role.CHOOSE, ALL_ENCODINGS),
    # -- update: environmental selection ------------------------------------
    ComponentSpec("update_always", Role.UPDATE, ALL_ENCODINGS),
    ComponentSpec("update_greedy", Role.UPDATE, ALL_ENCODINGS),
    ComponentSpec("update_pairwise", Role.UPDATE, ALL_ENCODINGS),
    ComponentSpec("update_round_robin", Role.UPDATE, ALL_ENCODINGS, (_int("q", 1, 20, 10),)),
    ComponentSpec(
        "update_simulated_annealing",
        Role.UPDATE,
        ALL_ENCODINGS,
        (_real("t0", 0.01, 100.0, 1.0, log_scale=True),),
    ),
    # -- archives: observer collections -------------------------------------
    ComponentSpec("archive_best", Role.ARCHIVE, ALL_ENCODINGS, (_int("capacity", 1, 50, 10),)),
    ComponentSpec(
        "archive_diversity", Role.ARCHIVE, ALL_ENCODINGS, (_int("capacity", 1, 50, 10),)
    ),
    ComponentSpec("archive_tabu", Role.ARCHIVE, ALL_ENCODINGS, (_int("tenure", 1, 50, 10),)),
)

CATALOG: dict[str, ComponentSpec] = {c.name: c for c in _COMPONENTS}

if len(CATALOG) != len(_COMPONENTS):
    raise RuntimeError("duplicate component names in catalog")


def component(name: str) -> ComponentSpec:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownComponent(f"unknown component {name!r}") from None


def components_for(role: Role, encoding: Encoding | None = None) -> tuple:
    """Catalog names of a role, optionally restricted to one encoding."""
    out = []
    for c in _COMPONENTS:
        if c.role is not role:
            continue
        if encoding is not None and not c.supports(encoding):
            continue
        out.append(c.name)
    return tuple(out)


def registry_json() -> str:
    """Export the catalog (names, roles, encodings, parameter schemas) as JSON."""
    rows = []
    for c in _COMPONENTS:
        rows.append(
            {
                "name": c.name,
                "role": c.role.value,
                "encodings": sorted(e.value for e in c.encodings),
                "params": [
                    {
                        "name": p.name,
                        "kind": p.kind.value,
                        "lower": p.lower,
                        "upper": p.upper,
                        "default": p.default,
                        "log_scale": p.log_scale,
                    }
                    for p in c.params
                ],
            }
        )
    return json.dumps(rows, indent=2)
