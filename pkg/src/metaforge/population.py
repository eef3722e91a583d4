"""Population state carried through one solve run."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Population:
    """Array-backed solution set.

    ``genomes`` is (N, dim); fitness arrays are aligned by row.  ``shared``
    holds per-vertex operator state (CMA distributions, PSO memories,
    annealing temperatures, archive contents) keyed by vertex id; it lives
    for one solve run and never crosses runs.
    """

    genomes: np.ndarray
    fitness: np.ndarray
    raw_fitness: np.ndarray
    violation: np.ndarray
    iteration: int = 0
    shared: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.genomes)

    def state_for(self, vertex_id: int) -> dict:
        return self.shared.setdefault(vertex_id, {})

    def best_index(self) -> int:
        return int(np.argmin(self.fitness))
