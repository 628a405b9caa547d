"""Figures written next to report files.  Nothing here is needed for checks."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["plot_reports", "plot_trace", "plot_field"]


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_reports(reports, path, title: str | None = None) -> Path:
    """Ratio per trial, one marker series per grid level, constants as dashed lines."""
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    for g in sorted({r.gen for r in reports}):
        rs = [r for r in reports if r.gen == g]
        ax.plot(range(len(rs)), [r.ratio for r in rs], ".", ms=4, label=f"G={g}")
    for c in sorted({r.constant for r in reports if np.isfinite(r.constant)}):
        ax.axhline(c, ls="--", lw=0.8, color="k")
    ax.set_xlabel("trial")
    ax.set_ylabel("ratio")
    ax.set_title(title or reports[0].check if reports else "")
    ax.legend(frameon=False, fontsize=8)
    return _save(fig, path)


def plot_trace(trace, path, title: str = "search") -> Path:
    it = [t[0] for t in trace]
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    ax.plot(it, [t[1] for t in trace], ".", ms=3, color="0.6", label="evaluated")
    ax.step(it, [t[2] for t in trace], where="post", color="C3", label="best so far")
    ax.set_xlabel("iteration")
    ax.set_ylabel("theorem ratio")
    ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    return _save(fig, path)


def plot_field(f, path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    if f.n == 1:
        ax.stairs(f.values, f.edges())
        ax.set_xlabel("x")
    else:
        lo, hi = -(2.0**f.extent), 2.0**f.extent
        im = ax.imshow(f.values.T, origin="lower", extent=(lo, hi, lo, hi))
        fig.colorbar(im, ax=ax)
    ax.set_title(title)
    return _save(fig, path)
