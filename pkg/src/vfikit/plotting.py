"""Figures written next to the scenario CSV logs (non-interactive backend)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .scenario import CONSTRAINTS, VIOLATION_TOL  # noqa: E402

__all__ = ["plot_distances", "plot_tracking", "write_figures"]

LABELS = {
    "C1": "C1 shaft / other shaft",
    "C2": "C2 shaft / entry point",
    "C3": "C3 lower shaft / centre line",
    "C4": "C4 tip / lower plane",
}


def plot_distances(results, path) -> Path:
    """One panel per constraint: signed margin (mm) against time, one curve per scenario."""
    fig, axes = plt.subplots(2, 2, figsize=(10, 6.5), sharex=True)
    for ax, (i, c) in zip(axes.flat, enumerate(CONSTRAINTS)):
        for res in results:
            t = np.array([r.t for r in res.records])
            m = np.array([r.d_tilde[i] for r in res.records]) * 1e3
            ax.plot(t, m, lw=1.2, label=res.name)
        ax.axhline(0.0, color="k", lw=0.8)
        ax.axhspan(-1e3 * VIOLATION_TOL, 1e3 * VIOLATION_TOL, color="0.85", zorder=0)
        ax.set_title(LABELS[c], fontsize=10)
        ax.set_ylabel("margin [mm]")
        ax.grid(alpha=0.3)
    for ax in axes[-1]:
        ax.set_xlabel("t [s]")
    axes.flat[0].legend(fontsize=8, ncol=2)
    fig.suptitle("Distance margins (negative = violated)", fontsize=11)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_tracking(results, path) -> Path:
    """Task error 1-norm and joint-velocity 2-norm for each scenario."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    for res in results:
        t = np.array([r.t for r in res.records])
        ax1.semilogy(t, np.maximum([r.err_l1 for r in res.records], 1e-12), lw=1.2, label=res.name)
        ax2.plot(t, [r.qdot_l2 for r in res.records], lw=1.2, label=res.name)
    ax1.set_ylabel(r"$\|\tilde{x}\|_1$")
    ax2.set_ylabel(r"$\|\dot{q}\|_2$")
    ax2.set_xlabel("t [s]")
    for ax in (ax1, ax2):
        ax.grid(alpha=0.3)
    ax1.legend(fontsize=8, ncol=5)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_figures(results, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    return [plot_distances(results, out_dir / "distances.png"),
            plot_tracking(results, out_dir / "tracking.png")]
