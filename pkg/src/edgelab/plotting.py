"""Figure rendering for the CLI report path.

Every delimited table the CLI writes can be rendered to a PNG next to it.
Figures are plain matplotlib line/heat plots with a shared, understated
style; they carry no information beyond the tables.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_FIGSIZE = (6.4, 4.2)
_DPI = 150


def _new_axes(xlabel, ylabel, title):
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_density(lam, rho, path, title="equilibrium density"):
    fig, ax = _new_axes(r"$\lambda$", r"$\rho(\lambda)$", title)
    ax.plot(lam, rho, lw=1.4)
    _save(fig, path)


def plot_recurrence(l, j, q, path):
    fig, ax = _new_axes("l", "coefficient", "recurrence coefficients")
    ax.plot(l, j, ".", ms=2.5, label=r"$J_\ell$")
    if np.any(np.asarray(q) != 0):
        ax.plot(l, q, ".", ms=2.5, label=r"$q_\ell$")
    ax.legend()
    _save(fig, path)


def plot_tw(s, f2, path):
    fig, ax = _new_axes("s", r"$F_2(s)$", "largest-eigenvalue limit law")
    ax.plot(s, f2, lw=1.4)
    ax.set_ylim(-0.02, 1.02)
    _save(fig, path)


def plot_kernel_edge(t, err, path):
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    im = ax.imshow(err, origin="lower", extent=(t[0], t[-1], t[0], t[-1]),
                   aspect="equal")
    ax.set_xlabel(r"$t_1$")
    ax.set_ylabel(r"$t_2$")
    ax.set_title("|rescaled kernel - Airy kernel|")
    fig.colorbar(im, ax=ax)
    _save(fig, path)


def plot_convergence(reports, path):
    """Log-log error-versus-n curves for a list of ConvergenceReports."""
    fig, ax = _new_axes("n", "error", "diagnostic convergence")
    for rep in reports:
        if len(rep.n_values) >= 2 and all(e > 0 for e in rep.errors):
            label = rep.name if rep.slope is None else \
                f"{rep.name} (slope {rep.slope:+.2f})"
            ax.loglog(rep.n_values, rep.errors, "o-", label=label)
    if ax.lines:
        ax.legend(fontsize=8)
    _save(fig, path)


def plot_refinement(history, path, title="determinant refinement"):
    fig, ax = _new_axes("quadrature order", "det", title)
    ax.plot([h["quad_order"] for h in history],
            [h["det"] for h in history], "o-")
    ax.set_xscale("log", base=2)
    _save(fig, path)
