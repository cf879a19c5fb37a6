"""Static SVG figures for the analysis pipeline.

All figures are rendered through a fixed hash salt with no embedded
timestamps, so rerunning a seeded pipeline reproduces each SVG byte for
byte.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .mds import MdsSolution, ScreeCurve  # noqa: E402
from .space import ParameterVector  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "texturespace"

_SAVE_OPTS = {"format": "svg", "metadata": {"Date": None}}


def _new_axes(xlabel, ylabel):
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_aspect("equal", adjustable="datalim")
    ax.grid(True, linewidth=0.4, alpha=0.5)
    return fig, ax


def _scatter(ax, xs, ys, ids):
    ax.scatter(xs, ys, s=28, color="#1f77b4", zorder=3)
    for x, y, tid in zip(xs, ys, ids):
        ax.annotate(
            str(tid), (x, y), textcoords="offset points", xytext=(4, 4),
            fontsize=7,
        )


def _draw_vectors(ax, vectors, axes_pair, scale):
    i, j = axes_pair
    for vector, color in zip(vectors, ("#d62728", "#2ca02c", "#9467bd")):
        dx, dy = vector.components[i], vector.components[j]
        norm2d = np.hypot(dx, dy)
        if norm2d == 0:
            continue
        dx, dy = dx / norm2d * scale, dy / norm2d * scale
        ax.annotate(
            "", xy=(dx, dy), xytext=(0.0, 0.0),
            arrowprops={"arrowstyle": "->", "color": color, "lw": 1.6},
        )
        ax.annotate(vector.name, (dx, dy), color=color, fontsize=9)


def plot_projection(
    path,
    solution: MdsSolution,
    ids,
    dims: tuple = (0, 1),
    vectors=(),
    placements=(),
) -> None:
    """Scatter two embedding dimensions, optionally with parameter arrows
    and group-name labels at their mean positions."""
    i, j = dims
    if max(i, j) >= solution.k:
        raise ValueError(f"dims {dims} out of range for k={solution.k}")
    coords = solution.coordinates
    fig, ax = _new_axes(f"dimension {i + 1}", f"dimension {j + 1}")
    _scatter(ax, coords[:, i], coords[:, j], ids)
    spread = float(np.abs(coords[:, [i, j]]).max())
    if vectors:
        _draw_vectors(ax, vectors, (i, j), scale=0.8 * spread)
    for placement in placements:
        ax.annotate(
            placement.label,
            (placement.position[i], placement.position[j]),
            fontsize=8, color="#555555", style="italic", ha="center",
        )
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def plot_plane_projection(
    path, solution: MdsSolution, ids, normal: ParameterVector, vectors=()
) -> None:
    """Project onto the plane perpendicular to a parameter vector.

    Useful for viewing the layout with one parameter's direction of change
    pointing out of the page.
    """
    n = np.asarray(normal.components, dtype=float)
    if np.linalg.norm(n) == 0:
        raise ValueError("normal vector must be nonzero")
    if solution.k < 3:
        raise ValueError("plane projection needs a 3-d embedding")
    n = n / np.linalg.norm(n)
    # orthonormal basis of the perpendicular plane, deterministic choice
    pick = int(np.argmin(np.abs(n)))
    helper = np.zeros(solution.k)
    helper[pick] = 1.0
    e1 = helper - np.dot(helper, n) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n[:3], e1[:3]) if solution.k == 3 else None
    if e2 is None:
        raise ValueError("plane projection implemented for k=3 only")
    basis = np.column_stack([e1, e2])
    projected = solution.coordinates @ basis
    fig, ax = _new_axes(
        f"in-plane axis 1 (perpendicular to {normal.name})", "in-plane axis 2"
    )
    _scatter(ax, projected[:, 0], projected[:, 1], ids)
    if vectors:
        flat = [
            ParameterVector(name=v.name, components=v.components @ basis)
            for v in vectors
        ]
        spread = float(np.abs(projected).max())
        _draw_vectors(ax, flat, (0, 1), scale=0.8 * spread)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def plot_scree(path, curve: ScreeCurve) -> None:
    """Stress against dimension count with the acceptability cutoff line."""
    ks = [k for k, _ in curve.points]
    stresses = curve.stresses()
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    ax.plot(ks, stresses, marker="o", color="#1f77b4")
    ax.axhline(curve.cutoff, color="#d62728", linewidth=1.0, linestyle="--")
    ax.set_xlabel("dimensions")
    ax.set_ylabel("stress-1")
    ax.set_xticks(ks)
    ax.set_ylim(bottom=0.0)
    ax.grid(True, linewidth=0.4, alpha=0.5)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
