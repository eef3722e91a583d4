"""Result files: delimited outputs plus rendered figures.

Every CSV the command line emits gets a companion PNG rendered with
matplotlib (Agg backend, no display needed): convergence curves for design
runs, best-so-far trajectories for solve runs.
"""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def format_mean_std(values) -> str:
    """Mean with a scientific-notation sample standard deviation,
    e.g. ``0.0332±5.05E-04``."""
    values = np.asarray(list(values), dtype=float)
    mean = float(values.mean())
    std = float(values.std(ddof=1)) if len(values) > 1 else 0.0
    if mean != 0 and (abs(mean) < 1e-3 or abs(mean) >= 1e4):
        mean_txt = f"{mean:.4E}"
    else:
        mean_txt = f"{mean:.4f}"
    return f"{mean_txt}±{std:.2E}"


def write_csv(path: Path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return path


def write_convergence(path: Path, convergence) -> Path:
    return write_csv(path, ["iteration", "best_aggregate"], convergence)


def write_trajectory(path: Path, trajectory) -> Path:
    return write_csv(path, ["fe", "best_fitness"], trajectory)


def write_evaluation_log(path: Path, rows) -> Path:
    return write_csv(path, ["candidate", "instance", "rep", "score", "censored", "surrogate"], rows)


def render_convergence(path: Path, convergence) -> Path:
    iters = [i for i, _ in convergence]
    best = [b for _, b in convergence]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(iters, best, marker="o", markersize=3, linewidth=1.2)
    ax.set_xlabel("design iteration")
    ax.set_ylabel("best training aggregate")
    ax.set_title("design convergence")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def render_trajectories(path: Path, trajectories, labels=None) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for i, traj in enumerate(trajectories):
        fes = [fe for fe, _ in traj]
        fits = [f for _, f in traj]
        label = labels[i] if labels else f"rep {i}"
        ax.step(fes, fits, where="post", linewidth=1.0, label=label, alpha=0.8)
    ax.set_xlabel("function evaluations")
    ax.set_ylabel("best fitness so far")
    ax.set_title("solve trajectories")
    if len(trajectories) <= 10:
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)
