"""Passive-beamforming sum-rate problem for a surface of phase-shift elements.

A base station with M antennas serves K single-antenna users through both
a direct channel and a reflecting surface of N passive elements, each
applying one of 2^b discrete phase shifts (unit reflection amplitude).
The genome is the length-N vector of phase indices.  Given the phases,
the active beamformers are fixed by maximum-ratio transmission toward the
effective channel with an equal power split, which satisfies the transmit
power budget with equality; the search space is therefore purely discrete.

Fitness follows the minimization convention: the reciprocal of the sum of
the users' log2(1 + SINR) rates, with a large sentinel when the rate is
zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..encodings import make_discrete
from . import InstanceRole, ProblemInstance

ZERO_RATE_SENTINEL = 1e18


@dataclass(frozen=True)
class BeamformingInstance:
    """Channel realization and system constants for one problem instance."""

    m_antennas: int
    k_users: int
    n_elements: int
    phase_bits: int
    power_budget: float
    noise_power: float
    h_direct: np.ndarray   # (M, K) base station -> users
    g_surface: np.ndarray  # (N, M) base station -> surface
    h_reflect: np.ndarray  # (N, K) surface -> users
    channel_seed: int

    @property
    def codebook_size(self) -> int:
        return 2**self.phase_bits

    def phases(self, tau: np.ndarray) -> np.ndarray:
        return np.asarray(tau) * (2.0 * np.pi / self.codebook_size)

    def _check_tau(self, tau: np.ndarray) -> np.ndarray:
        tau = np.asarray(tau)
        if tau.shape[-1] != self.n_elements:
            raise IndexError(f"phase vector length {tau.shape[-1]} != {self.n_elements}")
        if np.any(tau < 0) or np.any(tau >= self.codebook_size):
            raise IndexError("phase index outside the codebook")
        return tau


def _effective_channels(inst: BeamformingInstance, tau: np.ndarray) -> np.ndarray:
    """Per-user effective channel h_d,k + G^H diag(theta)^H h_r,k, shape (B, M, K)."""
    tau = np.atleast_2d(inst._check_tau(tau))
    theta = np.exp(1j * inst.phases(tau))  # (B, N)
    reflected = np.einsum("nm,bnk->bmk", inst.g_surface.conj(), theta.conj()[:, :, None] * inst.h_reflect)
    return inst.h_direct[None, :, :] + reflected


def sum_rate_batch(inst: BeamformingInstance, taus: np.ndarray) -> np.ndarray:
    """Sum of users' log2(1 + SINR) for each phase-index vector in the batch."""
    heff = _effective_channels(inst, taus)  # (B, M, K)
    norms = np.linalg.norm(heff, axis=1)  # (B, K)
    scale = np.sqrt(inst.power_budget / inst.k_users)
    safe = np.where(norms > 0, norms, 1.0)
    w = scale * heff / safe[:, None, :]
    w = np.where(norms[:, None, :] > 0, w, 0.0)
    # cross[b, k, j] = h_k^H w_j
    cross = np.einsum("bmk,bmj->bkj", heff.conj(), w)
    power = np.abs(cross) ** 2
    signal = np.einsum("bkk->bk", power).copy()
    interference = power.sum(axis=2) - signal
    sinr = signal / (interference + inst.noise_power)
    return np.sum(np.log2(1.0 + sinr), axis=1)


def sum_rate(inst: BeamformingInstance, tau: np.ndarray) -> float:
    return float(sum_rate_batch(inst, np.asarray(tau).reshape(1, -1))[0])


def beamforming_fitness(inst: BeamformingInstance, tau: np.ndarray):
    """(raw fitness, violation): reciprocal rate, power met by construction."""
    rate = sum_rate(inst, tau)
    raw = 1.0 / rate if rate > 0 else ZERO_RATE_SENTINEL
    return raw, 0.0


def beamformers(inst: BeamformingInstance, tau: np.ndarray) -> np.ndarray:
    """The maximum-ratio transmit vectors used inside the rate computation."""
    heff = _effective_channels(inst, np.asarray(tau).reshape(1, -1))[0]
    norms = np.linalg.norm(heff, axis=0)
    scale = np.sqrt(inst.power_budget / inst.k_users)
    safe = np.where(norms > 0, norms, 1.0)
    w = scale * heff / safe[None, :]
    return np.where(norms[None, :] > 0, w, 0.0)


def make_beamforming_instances(
    m_antennas: int = 4,
    k_users: int = 4,
    phase_bits: int = 2,
    n_elements_list=(16, 24, 32, 48, 64),
    power_budget: float = 1.0,
    noise_power: float = 1.0,
    master_seed: int = 0,
) -> list:
    """One instance per surface size, with channels drawn i.i.d. circularly
    symmetric complex gaussian (unit variance per entry) from seeds derived
    deterministically from the master seed."""
    out = []
    for i, n in enumerate(n_elements_list):
        rng = np.random.default_rng([int(master_seed), i])

        def csg(*shape):
            return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)

        out.append(
            BeamformingInstance(
                m_antennas=m_antennas,
                k_users=k_users,
                n_elements=int(n),
                phase_bits=phase_bits,
                power_budget=power_budget,
                noise_power=noise_power,
                h_direct=csg(m_antennas, k_users),
                g_surface=csg(n, m_antennas),
                h_reflect=csg(n, k_users),
                channel_seed=int(master_seed),
            )
        )
    return out


def as_problem(inst: BeamformingInstance, role=InstanceRole.TRAINING,
               instance_id: str | None = None) -> ProblemInstance:
    """Wrap a channel realization as a discrete problem instance."""
    spec = make_discrete(inst.n_elements, inst.codebook_size)

    def ev(tau):
        return beamforming_fitness(inst, tau)

    def ev_batch(taus):
        rates = sum_rate_batch(inst, np.asarray(taus))
        raw = np.where(rates > 0, 1.0 / np.where(rates > 0, rates, 1.0), ZERO_RATE_SENTINEL)
        return raw, np.zeros(len(taus))

    iid = instance_id or f"beamforming-n{inst.n_elements}-b{inst.phase_bits}-s{inst.channel_seed}"
    return ProblemInstance(spec, ev, iid, role, evaluate_batch=ev_batch)


def sequential_beamforming(inst: BeamformingInstance, seed: int = 0):
    """Enumerate each element's phase one-by-one from a random start.

    Single pass; costs exactly N x 2^b rate evaluations.  Returns the final
    phase vector and its fitness (reciprocal rate).
    """
    rng = np.random.default_rng(seed)
    tau = rng.integers(0, inst.codebook_size, size=inst.n_elements, dtype=np.int64)
    best_rate = -np.inf
    for n in range(inst.n_elements):
        rates = np.empty(inst.codebook_size)
        for v in range(inst.codebook_size):
            trial = tau.copy()
            trial[n] = v
            rates[v] = sum_rate(inst, trial)
        v_best = int(np.argmax(rates))
        tau[n] = v_best
        best_rate = float(rates[v_best])
    fitness = 1.0 / best_rate if best_rate > 0 else ZERO_RATE_SENTINEL
    return tau, fitness


def enumerate_optimum(inst: BeamformingInstance):
    """Brute-force best phase vector over the whole codebook (toy sizes only)."""
    n, v = inst.n_elements, inst.codebook_size
    total = v**n
    if total > 2**20:
        raise ValueError("codebook too large to enumerate")
    grid = np.stack(np.meshgrid(*[np.arange(v)] * n, indexing="ij")).reshape(n, total).T
    rates = sum_rate_batch(inst, grid.astype(np.int64))
    best = int(np.argmax(rates))
    return grid[best].astype(np.int64), float(rates[best])
