"""Figure rendering for the report paths.

Renders Hasse diagrams, embedding tables and suite summaries to image
files next to the delimited output streams.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def _levels(P):
    """Longest-path depth from the minimal elements, per element."""
    depth = {}

    def rec(p):
        if p in depth:
            return depth[p]
        below = [q for q in P.strictly_below(p)]
        depth[p] = 1 + max((rec(q) for q in below), default=-1)
        return depth[p]

    for p in P.elements:
        rec(p)
    return depth


def _layout(P):
    depth = _levels(P)
    rows = {}
    for p in sorted(P.elements):
        rows.setdefault(depth[p], []).append(p)
    pos = {}
    for level, row in rows.items():
        for i, p in enumerate(row):
            pos[p] = (i - (len(row) - 1) / 2.0, level)
    return pos


def draw_hasse(ax, P, node_size=900):
    pos = _layout(P)
    for a, b in P.covers():
        xa, ya = pos[a]
        xb, yb = pos[b]
        ax.plot([xa, xb], [ya, yb], color="0.55", lw=1.2, zorder=1)
    xs = [pos[p][0] for p in P.elements]
    ys = [pos[p][1] for p in P.elements]
    ax.scatter(xs, ys, s=node_size, facecolor="white", edgecolor="0.2", zorder=2)
    for p in P.elements:
        ax.annotate(
            p, pos[p], ha="center", va="center", fontsize=9, zorder=3
        )
    ax.set_title(P.label, fontsize=10)
    ax.set_axis_off()
    ax.margins(0.2)


def save_hasse(P, path):
    fig, ax = plt.subplots(figsize=(3.2, 3.2))
    draw_hasse(ax, P)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def save_embedding(B, path):
    """Embedding table of the completion as a boolean matrix image."""
    P = B.poset
    atoms = list(B.atoms)
    rows = list(P.elements)
    grid = [[1 if a in B.embed[p] else 0 for a in atoms] for p in rows]
    fig, ax = plt.subplots(figsize=(1.2 + 0.5 * len(atoms), 1.0 + 0.4 * len(rows)))
    ax.imshow(grid, cmap="Greys", vmin=0, vmax=1.6, aspect="auto")
    ax.set_xticks(range(len(atoms)), atoms, fontsize=8)
    ax.set_yticks(range(len(rows)), rows, fontsize=8)
    ax.set_title(f"embedding into {len(atoms)}-atom completion", fontsize=9)
    for spine in ax.spines.values():
        spine.set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def save_poset_grid(posets, path, columns=6):
    rows = (len(posets) + columns - 1) // columns
    fig, axes = plt.subplots(
        rows, columns, figsize=(2.1 * columns, 2.1 * rows), squeeze=False
    )
    for ax in axes.flat:
        ax.set_axis_off()
    for ax, P in zip(axes.flat, posets):
        draw_hasse(ax, P, node_size=350)
    fig.suptitle(f"instance space: {len(posets)} posets", fontsize=11)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_suite_chart(report, path):
    results = report.results
    labels = [f"{r.suite}/{r.pid}" for r in results]
    instances = [r.instances for r in results]
    failures = [r.failures for r in results]
    colors = [
        "#b33" if (r.failures and not r.probe) else ("#d90" if r.failures else "#2a7")
        for r in results
    ]
    fig, ax = plt.subplots(figsize=(9, 0.45 * len(results) + 1.4))
    y = range(len(results))
    ax.barh(y, instances, color=colors, alpha=0.75)
    for i, (n, k) in enumerate(zip(instances, failures)):
        note = f"{n}" + (f"  ({k} findings)" if k else "")
        ax.text(n, i, " " + note, va="center", fontsize=8)
    ax.set_yticks(list(y), labels, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("instances checked")
    ax.set_title("suite results (green: clean, amber: probe findings, red: failures)")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
