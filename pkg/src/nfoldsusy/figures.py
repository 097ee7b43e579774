"""Report figures: the partner potential with its low-lying levels."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .spectral import SpectralProblem, SpectralResult
from .susy import potential


def spectrum_figure(problem: SpectralProblem, result: SpectralResult,
                    path: str, n_levels: int | None = None) -> str:
    """Draw the potential of the problem's Hamiltonian with dashed lines at
    the lowest eigenvalues and save a PNG next to the data."""
    g = problem.g
    if problem.model.kind == "periodic":
        qs = np.linspace(-math.pi / (2 * g), 3 * math.pi / (2 * g), 600)
    else:
        qs = np.linspace(problem.grid[0], problem.grid[1], 800)
    v = potential(problem.model, problem.sign, problem.n)
    vv = np.array([v.eval_numeric(g, q).real for q in qs])

    if n_levels is None:
        n_levels = problem.n + 4
    levels = result.eigenvalues[:n_levels]

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(qs, vv, color="black", lw=1.2, label="potential")
    top = max(levels[-1], vv.min()) + 0.15 * (vv.max() - vv.min() + 1e-9)
    for e in levels:
        ax.axhline(e, ls="--", lw=0.8, color="tab:blue")
    sign = "+" if problem.sign > 0 else "-"
    ax.set_xlabel("q")
    ax.set_ylabel("energy")
    ax.set_title(f"{problem.model.kind} model, H({sign}{problem.n}), "
                 f"g = {g}, {problem.boundary}")
    ax.set_ylim(vv.min() - 0.1 * abs(vv.min() + 1e-9), top)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
