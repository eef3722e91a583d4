"""Minimal covariance matrix adaptation evolution strategy (ask/tell).

Implements the standard machinery: weighted recombination of the best
half, cumulative step-size adaptation, and rank-one plus rank-mu
covariance updates.  Used both as a search component inside solve runs
and as the hyperparameter tuner in the design loop.
"""
from __future__ import annotations

import numpy as np


def default_popsize(dim: int) -> int:
    return 4 + int(np.floor(3 * np.log(max(dim, 1))))


class CmaEs:
    """Rank-mu CMA-ES minimizer over R^dim."""

    def __init__(self, x0, sigma0: float, popsize: int | None = None, rng=None):
        self.mean = np.asarray(x0, dtype=float).copy()
        self.dim = len(self.mean)
        self.sigma = float(sigma0)
        self.lam = int(popsize) if popsize else default_popsize(self.dim)
        self.rng = rng if rng is not None else np.random.default_rng()

        d = self.dim
        self.mu = self.lam // 2
        w = np.log((self.lam + 1) / 2.0) - np.log(np.arange(1, self.mu + 1))
        self.weights = w / w.sum()
        self.mueff = 1.0 / np.sum(self.weights**2)

        self.c_sigma = (self.mueff + 2.0) / (d + self.mueff + 5.0)
        self.d_sigma = (
            1.0 + 2.0 * max(0.0, np.sqrt((self.mueff - 1.0) / (d + 1.0)) - 1.0) + self.c_sigma
        )
        self.c_c = (4.0 + self.mueff / d) / (d + 4.0 + 2.0 * self.mueff / d)
        self.c_1 = 2.0 / ((d + 1.3) ** 2 + self.mueff)
        self.c_mu = min(
            1.0 - self.c_1,
            2.0 * (self.mueff - 2.0 + 1.0 / self.mueff) / ((d + 2.0) ** 2 + self.mueff),
        )
        self.chi_n = np.sqrt(d) * (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d * d))

        self.p_sigma = np.zeros(d)
        self.p_c = np.zeros(d)
        self.cov = np.eye(d)
        self._decompose()
        self.generation = 0
        self.best_x = self.mean.copy()
        self.best_f = np.inf

    def _decompose(self):
        cov = (self.cov + self.cov.T) / 2.0
        eigvals, eigvecs = np.linalg.eigh(cov)
        eigvals = np.maximum(eigvals, 1e-20)
        self._B = eigvecs
        self._D = np.sqrt(eigvals)
        self._inv_sqrt = eigvecs @ np.diag(1.0 / self._D) @ eigvecs.T

    def ask(self, n: int | None = None) -> np.ndarray:
        n = n if n is not None else self.lam
        z = self.rng.standard_normal((n, self.dim))
        return self.mean + self.sigma * (z * self._D) @ self._B.T

    def tell(self, xs: np.ndarray, fs) -> None:
        """Update the distribution from evaluated points (lower f is better)."""
        fs = np.asarray(fs, dtype=float)
        order = np.argsort(fs, kind="stable")
        if fs[order[0]] < self.best_f:
            self.best_f = float(fs[order[0]])
            self.best_x = np.asarray(xs)[order[0]].copy()
        mu = min(self.mu, len(order))
        if mu == 0:
            return
        w = self.weights[:mu] / self.weights[:mu].sum()
        sel = np.asarray(xs, dtype=float)[order[:mu]]
        y = (sel - self.mean) / self.sigma
        delta = w @ y
        self.mean = self.mean + self.sigma * delta

        self.generation += 1
        self.p_sigma = (1.0 - self.c_sigma) * self.p_sigma + np.sqrt(
            self.c_sigma * (2.0 - self.c_sigma) * self.mueff
        ) * (self._inv_sqrt @ delta)
        h_sig = float(
            np.linalg.norm(self.p_sigma)
            / np.sqrt(1.0 - (1.0 - self.c_sigma) ** (2 * self.generation))
            / self.chi_n
            < 1.4 + 2.0 / (self.dim + 1.0)
        )
        self.p_c = (1.0 - self.c_c) * self.p_c + h_sig * np.sqrt(
            self.c_c * (2.0 - self.c_c) * self.mueff
        ) * delta
        rank_mu = (y * w[:, None]).T @ y
        self.cov = (
            (1.0 - self.c_1 - self.c_mu) * self.cov
            + self.c_1
            * (np.outer(self.p_c, self.p_c) + (1.0 - h_sig) * self.c_c * (2.0 - self.c_c) * self.cov)
            + self.c_mu * rank_mu
        )
        self.sigma = self.sigma * np.exp(
            (self.c_sigma / self.d_sigma) * (np.linalg.norm(self.p_sigma) / self.chi_n - 1.0)
        )
        self.sigma = float(np.clip(self.sigma, 1e-30, 1e30))
        self._decompose()


def minimize(fn, x0, sigma0, budget, rng, popsize=None, clip01=False):
    """Budgeted ask/tell loop; returns (best_x, best_f, evaluations used).

    The start point is injected into the first batch so the result never
    loses to the input under a noise-free objective.
    """
    es = CmaEs(x0, sigma0, popsize=popsize, rng=rng)
    spent = 0
    first = True
    while spent < budget:
        n = min(es.lam, budget - spent)
        xs = es.ask(n)
        if first:
            xs[0] = np.asarray(x0, dtype=float)
            first = False
        if clip01:
            xs = np.clip(xs, 0.0, 1.0)
        fs = np.array([fn(x) for x in xs], dtype=float)
        spent += n
        es.tell(xs, fs)
    return es.best_x, es.best_f, spent
