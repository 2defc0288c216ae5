"""SVG views of inequality ratios."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# fixed ids and no date keep the SVG byte-stable across runs
plt.rcParams["svg.hashsalt"] = "saitohlab"


def plot_ratios(params: Sequence[float], ratios: Sequence[float], path: str | Path,
                title: str = "", xlabel: str = "parameter", labels: Sequence[str] | None = None) -> Path:
    """Line plot of ``ratio`` against the sweep parameter, with the line ``ratio = 1``.

    With ``labels`` the points are categorical (one per theorem or identity).
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if labels is not None:
        xs = list(range(len(ratios)))
        ax.plot(xs, ratios, "o")
        ax.set_xticks(xs)
        ax.set_xticklabels(labels, rotation=45, ha="right")
    else:
        ax.plot(params, ratios, "o-")
        ax.set_xlabel(xlabel)
    ax.axhline(1.0, color="gray", lw=0.8, ls="--")
    ax.set_ylabel("lhs / rhs")
    ax.ticklabel_format(axis="y", useOffset=False)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_identity_errors(ids: Sequence[str], errors: Sequence[float], tol: float,
                         path: str | Path) -> Path:
    """Log-scale bars of the largest relative error per identity against ``tol``."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs = list(range(len(ids)))
    # exact agreement would vanish on a log axis
    floor = 1e-17
    ax.bar(xs, [max(e, floor) for e in errors], color="tab:blue")
    ax.axhline(tol, color="tab:red", lw=0.8, ls="--", label=f"tol {tol:g}")
    ax.set_yscale("log")
    ax.set_xticks(xs)
    ax.set_xticklabels(ids, rotation=45, ha="right")
    ax.set_ylabel("max relative error")
    ax.set_title("decomposition identities")
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
