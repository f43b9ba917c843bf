"""PNG figures for growth tables; always rendered off-screen."""
from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
from matplotlib import pyplot as plt  # noqa: E402

from .distortion_lab import GrowthTable  # noqa: E402

STYLE = {"figure.figsize": (6.0, 4.0), "figure.dpi": 110, "axes.grid": True, "grid.alpha": 0.3,
         "font.size": 9, "savefig.bbox": "tight"}


def plot_growth(table: GrowthTable, fit: dict | None, path, iterate: int | None = None) -> Path:
    """Kernel length against x, logged ``iterate`` times (default: the fitted depth, at least once)."""
    rows = sorted(table.usable(), key=lambda r: r.x)
    depth = iterate if iterate is not None else max(1, (fit or {}).get("depth", 1))
    xs, ys = [], []
    for r in rows:
        y = float(r.kernel)
        ok = True
        for _ in range(depth):
            if y <= 0:
                ok = False
                break
            y = math.log(y)
        if ok:
            xs.append(r.x)
            ys.append(y)
    path = Path(path)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(xs, ys, "o-", ms=3, lw=1, color="tab:blue", label=table.label or "measured")
        ax.set_xlabel("x")
        ax.set_ylabel("log " * depth + "kernel length" if depth else "kernel length")
        if fit:
            ax.set_title(f"{fit['model']} (depth {fit['depth']}, slope {fit['slope']:.3f})")
        trunc = [r.x for r in table.rows if r.truncated]
        if trunc:
            ax.text(0.02, 0.95, f"truncated at x = {trunc}", transform=ax.transAxes, va="top", fontsize=7)
        ax.legend(loc="lower right", fontsize=7)
        fig.savefig(path)
        plt.close(fig)
    return path


def plot_loglog(table: GrowthTable, path) -> Path:
    rows = [r for r in sorted(table.usable(), key=lambda r: r.x) if r.kernel > 0]
    path = Path(path)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.loglog([r.x for r in rows], [r.kernel for r in rows], "s-", ms=3, lw=1, color="tab:red")
        ax.set_xlabel("x")
        ax.set_ylabel("kernel length")
        ax.set_title(table.label)
        fig.savefig(path)
        plt.close(fig)
    return path
