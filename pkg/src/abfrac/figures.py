"""Render solution grids and verification reports to PNG files.

matplotlib is imported lazily with the Agg backend so the computational
modules stay import-light and figures render identically headless.
"""

from __future__ import annotations

import numpy as np


def _plt():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def ivp_figure(path, t, curves: dict, title: str = "") -> str:
    """Line plot of solution curves; an 'abs_diff' entry gets its own log panel."""
    plt = _plt()
    diff = curves.pop("abs_diff", None)
    if diff is not None:
        fig, (ax, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
        positive = np.maximum(np.asarray(diff), 1e-18)
        ax2.semilogy(t, positive, color="tab:red", lw=1.0)
        ax2.set_ylabel("|closed - picard|")
        ax2.set_xlabel("t")
        ax2.grid(alpha=0.3)
    else:
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.set_xlabel("t")
    for label, values in curves.items():
        ax.plot(t, values, lw=1.4, label=label)
    ax.set_ylabel("u(t)")
    ax.grid(alpha=0.3)
    if len(curves) > 1:
        ax.legend(frameon=False)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def bvp_figure(path, x, t, values, title: str = "") -> str:
    """Heatmap of u(x, t) over the space-time rectangle."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    mesh = ax.pcolormesh(t, x, values, shading="auto", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="u(x, t)")
    ax.set_xlabel("t")
    ax.set_ylabel("x")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def verify_figure(path, results) -> str:
    """Measured error vs allowed tolerance per suite, log scale."""
    plt = _plt()
    names = [r.name for r in results]
    measured = [max(r.max_error, 1e-18) for r in results]
    allowed = [r.tolerance for r in results]
    colors = ["tab:green" if r.passed else "tab:red" for r in results]
    pos = np.arange(len(names))
    fig, ax = plt.subplots(figsize=(7, 1.2 + 0.7 * len(names)))
    ax.barh(pos, measured, color=colors, height=0.55)
    for p, tol in zip(pos, allowed):
        ax.plot([tol, tol], [p - 0.35, p + 0.35], color="k", lw=1.2)
    ax.set_xscale("log")
    ax.set_yticks(pos, names)
    ax.invert_yaxis()
    ax.set_xlabel("measured error (bar) vs allowed (tick)")
    ax.grid(axis="x", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)
