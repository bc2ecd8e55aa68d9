"""Optional matplotlib rendering of CLI outputs.

Rendering is opt-in (config key ``output.figures``); the delimited outputs
remain the primary artifacts.  Uses the Agg backend so it works headless.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _fig_size(width_in: float = 4.4, nrows: int = 1):
    return (width_in, width_in * _GOLDEN * nrows)


plt.rcParams.update(
    {
        "font.size": 9,
        "axes.labelsize": 9,
        "legend.fontsize": 8,
        "xtick.labelsize": 8,
        "ytick.labelsize": 8,
        "figure.figsize": _fig_size(),
        "savefig.dpi": 160,
        "savefig.bbox": "tight",
    }
)

_PHASE_COLORS = {"NP": "#d7e8f7", "FSP": "#f7d7d7", "CSP": "#d7f7dd", "FASP": "#f3e7c3"}


def render_phase_diagram(boundary_rows, grid_rows, out_path):
    """Boundary curves over a phase-label grid."""
    fig, ax = plt.subplots()
    if grid_rows:
        thetas = sorted({r[0] for r in grid_rows})
        g1s = sorted({r[1] for r in grid_rows})
        idx = {p: i for i, p in enumerate(_PHASE_COLORS)}
        img = np.full((len(g1s), len(thetas)), np.nan)
        ti = {t: i for i, t in enumerate(thetas)}
        gi = {g: i for i, g in enumerate(g1s)}
        for th, g1, phase in grid_rows:
            if phase in idx:
                img[gi[g1], ti[th]] = idx[phase]
        cmap = matplotlib.colors.ListedColormap(list(_PHASE_COLORS.values()))
        ax.imshow(
            img,
            origin="lower",
            aspect="auto",
            extent=(min(thetas), max(thetas), min(g1s), max(g1s)),
            cmap=cmap,
            vmin=-0.5,
            vmax=len(_PHASE_COLORS) - 0.5,
            interpolation="nearest",
        )
    th = np.array([r[0] for r in boundary_rows])
    ax.plot(th, [r[1] for r in boundary_rows], "-", color="crimson", lw=1.2, label="q=0 boundary")
    ax.plot(th, [r[2] for r in boundary_rows], "--", color="darkred", lw=1.2, label="|q|=2pi/3 boundary")
    ax.set_xlabel(r"hopping phase $\theta$")
    ax.set_ylabel(r"scaled coupling $g_1$")
    ax.legend(loc="best")
    fig.savefig(out_path)
    plt.close(fig)


def render_sweep(rows, out_path):
    """Log-log view of QFI, photon number and soft gap against distance."""
    ok = [r for r in rows if r.status == "ok" and r.distance > 0]
    if not ok:
        return
    d = np.array([r.distance for r in ok])
    fig, ax = plt.subplots()
    for attr, label, marker in (("qfi", "I", "o"), ("n1", r"$\langle N_1\rangle$", "s"), ("eps_soft", r"$\epsilon_{soft}$", "^")):
        y = np.array([getattr(r, attr) for r in ok])
        good = np.isfinite(y) & (y > 0)
        if good.any():
            ax.loglog(d[good], y[good], marker, ms=3, lw=0.8, ls="-", label=label)
    ax.set_xlabel("normalized distance to the critical point")
    ax.legend(loc="best")
    fig.savefig(out_path)
    plt.close(fig)


def render_fit(distances, values, fit, column, out_path):
    fig, ax = plt.subplots()
    ax.loglog(distances, values, "o", ms=3, label=column)
    dd = np.geomspace(min(distances), max(distances), 50)
    ax.loglog(dd, np.exp(fit.intercept) * dd ** (-fit.nu), "-", lw=1.0,
              label=rf"fit $\nu$={fit.nu:.3f}, $r^2$={fit.r2:.4f}")
    ax.set_xlabel("normalized distance")
    ax.legend(loc="best")
    fig.savefig(out_path)
    plt.close(fig)
