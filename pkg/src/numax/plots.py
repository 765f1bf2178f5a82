"""Figure rendering for sweep tables and bound reports.

Renders the utility and energy-efficiency curves with their bound envelopes
and the transient points to PNG files, next to the delimited output the CLI
emits.  Uses the non-interactive Agg backend; nothing here ever opens a
window.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import BoundsReport
from .mappings import InterferenceMapping
from .norms import MonotoneNormSpec


def _finite_or_none(values):
    arr = np.asarray(values, dtype=float)
    return np.where(np.isfinite(arr), arr, np.nan)


def _decorate(ax, xlabel, ylabel, title):
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.4)
    ax.legend()


def render_sweep_figures(rows, report: BoundsReport, outdir, stem: str,
                         title: str = "") -> list[Path]:
    """Render utility and energy-efficiency figures for a sweep.

    `rows` are the CLI sweep rows (anything exposing p_bar, utility, ee_b,
    utility_lower/upper, ee_lower/upper).  Returns the written paths.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    budgets = np.array([r.p_bar for r in rows])
    written = []

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.semilogx(budgets, _finite_or_none([r.utility for r in rows]),
                "-o", ms=3, label="achieved utility")
    ax.semilogx(budgets, _finite_or_none([r.utility_lower for r in rows]),
                "--", label="lower bound")
    ax.semilogx(budgets, _finite_or_none([r.utility_upper for r in rows]),
                ":", label="upper bound")
    if math.isfinite(report.u):
        ax.axvline(report.u, color="gray", lw=1, label="transient point u")
    _decorate(ax, "power budget [W]", "utility", title)
    fig.tight_layout()
    path = outdir / f"{stem}_utility.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.loglog(budgets, _finite_or_none([r.ee_b for r in rows]),
              "-o", ms=3, label="energy efficiency")
    ax.loglog(budgets, _finite_or_none([r.ee_lower for r in rows]),
              "--", label="lower bound")
    ax.loglog(budgets, _finite_or_none([r.ee_upper for r in rows]),
              ":", label="upper bound")
    if math.isfinite(report.k):
        ax.axvline(report.k, color="gray", lw=1, label="transient point k")
    _decorate(ax, "power budget [W]", "energy efficiency [1/W]", title)
    fig.tight_layout()
    path = outdir / f"{stem}_energy_efficiency.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)
    return written


def render_bound_envelopes(T: InterferenceMapping, norm_a: MonotoneNormSpec,
                           norm_b: MonotoneNormSpec, report: BoundsReport,
                           outdir, stem: str, budgets=None,
                           title: str = "") -> list[Path]:
    """Render the bound envelopes alone (no solving) over a budget grid.

    Defaults to six decades straddling the transient point, or anchored at
    ||T(0)||_a when there is none.
    """
    from .analysis import ee_bounds, lower_bounding_matrix, utility_bounds

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if budgets is None:
        anchor = report.u if math.isfinite(report.u) else report.t0_norm_a
        budgets = np.geomspace(anchor * 1e-3, anchor * 1e3, 200)
    budgets = np.asarray(budgets, dtype=float)

    lbm = lower_bounding_matrix(T)
    util = np.array([utility_bounds(T, norm_a, b, lbm, report.beta) for b in budgets])
    ee = np.array([ee_bounds(T, norm_a, norm_b, b, lbm, report.alpha1,
                             report.alpha2, report.beta) for b in budgets])
    written = []

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.loglog(budgets, _finite_or_none(util[:, 0]), "--", label="utility lower bound")
    ax.loglog(budgets, _finite_or_none(util[:, 1]), ":", label="utility upper bound")
    if math.isfinite(report.u):
        ax.axvline(report.u, color="gray", lw=1, label="transient point u")
    _decorate(ax, "power budget [W]", "utility", title)
    fig.tight_layout()
    path = outdir / f"{stem}_utility_bounds.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.loglog(budgets, _finite_or_none(ee[:, 0]), "--", label="EE lower bound")
    ax.loglog(budgets, _finite_or_none(ee[:, 1]), ":", label="EE upper bound")
    if math.isfinite(report.k):
        ax.axvline(report.k, color="gray", lw=1, label="transient point k")
    _decorate(ax, "power budget [W]", "energy efficiency [1/W]", title)
    fig.tight_layout()
    path = outdir / f"{stem}_ee_bounds.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)
    return written
