import numpy as np
import pytest

import metaforge as mf
from metaforge import Encoding

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_record():
    """Collect one pass/fail line per acceptance criterion; the terminal
    summary hook prints them after the run."""

    def record(number, name, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        suffix = f" ({detail})" if detail else ""
        line = f"criterion {number} [{status}] {name}{suffix}"
        ACCEPTANCE_LINES.append((number, line))
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def discrete_space():
    return mf.build_default_space(Encoding.DISCRETE)


@pytest.fixture
def continuous_space():
    return mf.build_default_space(Encoding.CONTINUOUS)


@pytest.fixture
def permutation_space():
    return mf.build_default_space(Encoding.PERMUTATION)


@pytest.fixture
def niching_uniform_graph():
    """Niching selection, uniform crossover at rate 0.1229, single-entity
    reset, round-robin survival (4-vertex chain)."""
    return mf.build_chain(
        Encoding.DISCRETE,
        "choose_nich",
        [("cross_point_uniform", {"rate": 0.1229}), "search_reset_one"],
        ("update_round_robin", {"q": 10}),
    )


@pytest.fixture
def roulette_reset_graph():
    """Roulette selection, one-point crossover, random reset at rate 0.1342,
    round-robin survival (4-vertex chain)."""
    return mf.build_chain(
        Encoding.DISCRETE,
        "choose_roulette_wheel",
        ["cross_point_one", ("search_reset_rand", {"rate": 0.1342})],
        ("update_round_robin", {"q": 10}),
    )


class ScriptedRng:
    """Deterministic stand-in that pins the next integer draws and delegates
    everything else to a real generator."""

    def __init__(self, integer_queue, seed=0):
        self._queue = list(integer_queue)
        self._rng = np.random.default_rng(seed)

    def integers(self, low, high=None, size=None, **kwargs):
        if self._queue:
            if size is None:
                return self._queue.pop(0)
            out = [self._queue.pop(0) for _ in range(int(np.prod(size)))]
            return np.array(out).reshape(size)
        return self._rng.integers(low, high, size=size, **kwargs)

    def __getattr__(self, name):
        return getattr(self._rng, name)


@pytest.fixture
def scripted_rng():
    return ScriptedRng


def make_population(genomes, fitness=None, rng_seed=0):
    genomes = np.asarray(genomes)
    if fitness is None:
        fitness = np.arange(len(genomes), dtype=float)
    fitness = np.asarray(fitness, dtype=float)
    return mf.Population(
        genomes=genomes,
        fitness=fitness,
        raw_fitness=fitness.copy(),
        violation=np.zeros(len(genomes)),
    )


@pytest.fixture
def pop_factory():
    return make_population
