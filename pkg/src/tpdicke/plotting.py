"""Figure output for sweeps. Uses the object-oriented matplotlib API, no pyplot state."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib
import numpy as np
from matplotlib.figure import Figure
from matplotlib.patches import Patch, Rectangle

from .model import DickeError
from .sweep import CurvePoint, PhaseDiagram

PHASE_COLORS = {
    "N": "#4c72b0",
    "S": "#dd8452",
    "B": "#55a868",
    "I": "#c44e52",
}
ERROR_COLOR = "#999999"
AXIS_LABELS = {
    "g": r"$g/\omega_c$",
    "omega_0": r"$\omega_0/\omega_c$",
    "kappa": r"$\kappa/\omega_c$",
    "gamma": r"$\Gamma/\omega_c$",
    "gamma_down": r"$\Gamma_\downarrow/\omega_c$",
    "gamma_phi": r"$\Gamma_\phi/\omega_c$",
    "n_qubits": r"$N$",
    "omega_c": r"$\omega_c$",
}


def _edges(values: np.ndarray, log: bool) -> np.ndarray:
    v = np.log(values) if log else values
    mids = 0.5 * (v[1:] + v[:-1])
    e = np.concatenate([[v[0] - (mids[0] - v[0])], mids, [v[-1] + (v[-1] - mids[-1])]])
    return np.exp(e) if log else e


def _save(fig: Figure, path: str | Path) -> None:
    path = Path(path)
    # fixed salt and no date keep repeated SVG output byte-identical
    with matplotlib.rc_context({"svg.hashsalt": "tpdicke", "svg.fonttype": "none"}):
        try:
            fig.savefig(path, metadata={"Date": None} if path.suffix == ".svg" else None)
        except OSError as exc:
            raise DickeError(f"cannot write {path}: {exc}") from exc


def render_svg(diagram: PhaseDiagram, path: str | Path, title: str | None = None) -> None:
    """Heatmap of phase labels, one rectangle per grid point (SVG group id ``cell-i-j``)."""
    ex = _edges(diagram.axis1.values, diagram.axis1.log)
    ey = _edges(diagram.axis2.values, diagram.axis2.log)
    fig = Figure(figsize=(6, 4.5))
    ax = fig.add_subplot()
    for i in range(diagram.shape[0]):
        for j in range(diagram.shape[1]):
            label = diagram.labels[i, j]
            ax.add_patch(Rectangle((ex[i], ey[j]), ex[i + 1] - ex[i], ey[j + 1] - ey[j], linewidth=0,
                                   facecolor=PHASE_COLORS.get(label, ERROR_COLOR), gid=f"cell-{i}-{j}"))
    ax.set_xlim(ex[0], ex[-1])
    ax.set_ylim(ey[0], ey[-1])
    if diagram.axis1.log:
        ax.set_xscale("log")
    if diagram.axis2.log:
        ax.set_yscale("log")
    ax.set_xlabel(AXIS_LABELS.get(diagram.axis1.name, diagram.axis1.name))
    ax.set_ylabel(AXIS_LABELS.get(diagram.axis2.name, diagram.axis2.name))
    if title:
        ax.set_title(title)
    handles = [Patch(facecolor=c, label=k) for k, c in PHASE_COLORS.items()]
    ax.legend(handles=handles, loc="upper left", bbox_to_anchor=(1.01, 1.0), frameon=False)
    fig.tight_layout()
    _save(fig, path)


def render_photon_curve(curves: dict[str, Sequence[CurvePoint]], path: str | Path, g_threshold: float | None = None) -> None:
    """Superradiant photon number against coupling, one line per labelled curve.

    Stable stretches are drawn solid and unstable ones dashed.
    """
    fig = Figure(figsize=(6, 4))
    ax = fig.add_subplot()
    for i, (name, points) in enumerate(curves.items()):
        color = f"C{i}"
        g = np.array([p.g for p in points])
        n = np.array([p.n_ss if p.physical else np.nan for p in points])
        stable = np.array([p.stable for p in points])
        ax.plot(g, np.where(stable, n, np.nan), "-", color=color, label=name)
        ax.plot(g, np.where(stable, np.nan, n), "--", color=color, linewidth=0.8)
    ax.axhline(0.0, color="black", linewidth=0.8)
    if g_threshold is not None:
        ax.axvline(g_threshold, color="black", linestyle=":", linewidth=1)
    ax.set_xlabel(AXIS_LABELS["g"])
    ax.set_ylabel(r"$\langle a^\dagger a\rangle_{ss}$")
    ax.legend(frameon=False)
    fig.tight_layout()
    _save(fig, path)
