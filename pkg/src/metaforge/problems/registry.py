"""Named problem factories: the plugin contract used by run configs.

A factory takes a configuration mapping plus the requested number of
training and test instances and returns the two instance lists.  Register
your own with :func:`register_problem`; ``template.py`` walks through a
complete example.
"""
from __future__ import annotations

from ..errors import UnknownProblem
from . import (
    InstanceRole,
    make_knapsack,
    make_onemax,
    make_rastrigin,
    make_rosenbrock,
    make_sphere,
    make_tsp,
)
from .beamforming import as_problem, make_beamforming_instances

REGISTRY: dict = {}


def register_problem(name: str, factory) -> None:
    REGISTRY[name] = factory


def make_instances(name: str, cfg: dict, n_train: int, n_test: int):
    """Build (training, test) instance lists for a registered problem."""
    if name not in REGISTRY:
        raise UnknownProblem(
            f"unknown problem {name!r}; registered: {', '.join(sorted(REGISTRY))}"
        )
    return REGISTRY[name](dict(cfg), n_train, n_test)


def _replicated(maker, cfg, n_train, n_test):
    """Instances that differ only by index (and seed where applicable)."""
    train, test = [], []
    base_seed = int(cfg.get("seed", 0))
    for i in range(n_train + n_test):
        role = InstanceRole.TRAINING if i < n_train else InstanceRole.TEST
        inst = maker(cfg, base_seed + i, i, role)
        (train if i < n_train else test).append(inst)
    return train, test


def _sphere_factory(cfg, n_train, n_test):
    dim = int(cfg.get("dim", 10))
    return _replicated(
        lambda c, s, i, r: make_sphere(dim, role=r, instance_id=f"sphere-d{dim}-i{i}"),
        cfg, n_train, n_test,
    )


def _rastrigin_factory(cfg, n_train, n_test):
    dim = int(cfg.get("dim", 10))
    return _replicated(
        lambda c, s, i, r: make_rastrigin(dim, role=r, instance_id=f"rastrigin-d{dim}-i{i}"),
        cfg, n_train, n_test,
    )


def _rosenbrock_factory(cfg, n_train, n_test):
    dim = int(cfg.get("dim", 10))
    return _replicated(
        lambda c, s, i, r: make_rosenbrock(dim, role=r, instance_id=f"rosenbrock-d{dim}-i{i}"),
        cfg, n_train, n_test,
    )


def _onemax_factory(cfg, n_train, n_test):
    dim = int(cfg.get("dim", 50))
    return _replicated(
        lambda c, s, i, r: make_onemax(dim, role=r, instance_id=f"onemax-d{dim}-i{i}"),
        cfg, n_train, n_test,
    )


def _knapsack_factory(cfg, n_train, n_test):
    n_items = int(cfg.get("dim", 50))
    return _replicated(
        lambda c, s, i, r: make_knapsack(n_items, seed=s, role=r),
        cfg, n_train, n_test,
    )


def _tsp_factory(cfg, n_train, n_test):
    n_cities = int(cfg.get("dim", 20))
    return _replicated(
        lambda c, s, i, r: make_tsp(n_cities=n_cities, seed=s, role=r),
        cfg, n_train, n_test,
    )


def _beamforming_factory(cfg, n_train, n_test):
    sizes = cfg.get("n_list")
    if sizes is None:
        sizes = [int(cfg.get("n", 32))] * (n_train + n_test)
    else:
        sizes = [int(s) for s in sizes]
        if len(sizes) < n_train + n_test:
            raise UnknownProblem(
                f"beamforming n_list needs {n_train + n_test} sizes, got {len(sizes)}"
            )
    channels = make_beamforming_instances(
        m_antennas=int(cfg.get("antennas", 4)),
        k_users=int(cfg.get("users", 4)),
        phase_bits=int(cfg.get("bits", 2)),
        n_elements_list=sizes[: n_train + n_test],
        power_budget=float(cfg.get("power", 1.0)),
        noise_power=float(cfg.get("noise", 1.0)),
        master_seed=int(cfg.get("seed", 0)),
    )
    train, test = [], []
    for i, ch in enumerate(channels):
        role = InstanceRole.TRAINING if i < n_train else InstanceRole.TEST
        inst = as_problem(ch, role=role, instance_id=f"beamforming-n{ch.n_elements}-i{i}")
        (train if i < n_train else test).append(inst)
    return train, test


for _name, _factory in (
    ("sphere", _sphere_factory),
    ("rastrigin", _rastrigin_factory),
    ("rosenbrock", _rosenbrock_factory),
    ("onemax", _onemax_factory),
    ("knapsack", _knapsack_factory),
    ("tsp", _tsp_factory),
    ("beamforming", _beamforming_factory),
):
    register_problem(_name, _factory)
