"""Rendering: byte-stable SVG pictures of nets, and matplotlib report figures.

SVG output is a pure function of the canonical net (plus the tool version),
so repeated runs produce identical bytes.  The report figures are written
through the Agg backend and accompany the delimited verification output.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from wronski import __version__
from wronski.netcomb import CellComplex, NetClass, build_complex, dual_trees

_FILL_PLUS = "#cfe2f3"
_FILL_MINUS = "#f6d9c9"
_FILL_ROOT = "#8db8e6"


def _pt(angle: float) -> tuple[float, float]:
    # math coordinates with the y axis flipped for SVG
    return math.cos(angle), -math.sin(angle)


def _fmt(x: float) -> str:
    out = f"{x:.5f}"
    return "0.00000" if out == "-0.00000" else out


def _vertex_angle(k: int, n: int) -> float:
    return 2.0 * math.pi * k / n


def _face_path(cx: CellComplex, face_id: int) -> str:
    face = cx.face_by_id[face_id]
    n = cx.net.n_vertices
    parts = []
    start = _pt(_vertex_angle(face.vertices[0], n))
    parts.append(f"M {_fmt(start[0])} {_fmt(start[1])}")
    m = len(face.vertices)
    for i, e in enumerate(face.edges):
        tx, ty = _pt(_vertex_angle(face.vertices[(i + 1) % m], n))
        if e.kind == "arc":
            # anticlockwise short arc along the unit circle
            parts.append(f"A 1 1 0 0 0 {_fmt(tx)} {_fmt(ty)}")
        else:
            parts.append(f"L {_fmt(tx)} {_fmt(ty)}")
    parts.append("Z")
    return " ".join(parts)


def render_net_svg(net: NetClass) -> str:
    """Figure-style picture of the disk part of a net.

    Disk faces are colored by parity, the distinguished face darker, chords
    drawn as straight segments; the mirror half is omitted.
    """
    cx = build_complex(net)
    n = net.n_vertices
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- wronski {__version__} net d={net.d} -->",
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1.25 -1.25 2.5 2.5" '
        'width="360" height="360">',
    ]
    for face in cx.inside_faces:
        if face.id == cx.distinguished.g0:
            fill = _FILL_ROOT
        else:
            fill = _FILL_PLUS if face.parity == 1 else _FILL_MINUS
        lines.append(f'<path d="{_face_path(cx, face.id)}" fill="{fill}" stroke="none"/>')
    lines.append(
        '<circle cx="0" cy="0" r="1" fill="none" stroke="#333333" stroke-width="0.02"/>'
    )
    for i, j in net.matching:
        xi, yi = _pt(_vertex_angle(i, n))
        xj, yj = _pt(_vertex_angle(j, n))
        lines.append(
            f'<line x1="{_fmt(xi)}" y1="{_fmt(yi)}" x2="{_fmt(xj)}" y2="{_fmt(yj)}" '
            'stroke="#1a1a1a" stroke-width="0.02"/>'
        )
    for k in range(1, n + 1):
        x, y = _pt(_vertex_angle(k, n))
        lines.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="0.035" fill="#1a1a1a"/>')
        lx, ly = _pt(_vertex_angle(k, n))
        lines.append(
            f'<text x="{_fmt(1.12 * lx)}" y="{_fmt(1.12 * ly + 0.03)}" '
            f'font-size="0.11" text-anchor="middle" fill="#333333">v{k}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_dual_tree_svg(net: NetClass) -> str:
    """Layered drawing of the extended dual tree, root on top, arc leaves below."""
    cx = build_complex(net)
    _, s_hat = dual_trees(cx)
    parents = s_hat.parents()
    depth = {s_hat.root: 0}
    order = [s_hat.root]
    for node in order:
        for other, _ in sorted(s_hat.neighbors[node], key=str):
            if other not in depth:
                depth[other] = depth[node] + 1
                order.append(other)
    max_depth = max(depth.values())
    by_depth: dict[int, list] = {}
    for node in order:
        by_depth.setdefault(depth[node], []).append(node)

    coords = {}
    for level, nodes in by_depth.items():
        for i, node in enumerate(nodes):
            x = (i + 1) / (len(nodes) + 1) * 2.4 - 1.2
            y = -1.0 + 2.0 * level / max(max_depth, 1)
            coords[node] = (x, y)

    def name(node) -> str:
        return node.label if hasattr(node, "label") else f"q{node}"

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- wronski {__version__} dual tree d={net.d} -->",
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-1.4 -1.3 2.8 2.6" '
        'width="360" height="330">',
    ]
    for u, v, e in s_hat.edges:
        (x1, y1), (x2, y2) = coords[u], coords[v]
        lines.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            'stroke="#777777" stroke-width="0.015"/>'
        )
        mx, my = (x1 + x2) / 2, (y1 + y2) / 2
        lines.append(
            f'<text x="{_fmt(mx + 0.03)}" y="{_fmt(my)}" font-size="0.08" '
            f'fill="#aa5522">{e.label}</text>'
        )
    for node, (x, y) in coords.items():
        leaf = hasattr(node, "label")
        color = "#44aa44" if leaf else "#2255aa"
        lines.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="0.05" fill="{color}"/>')
        lines.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y - 0.08)}" font-size="0.09" '
            f'text-anchor="middle" fill="#222222">{name(node)}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# matplotlib report figures
# ---------------------------------------------------------------------------

def _draw_net_axes(ax, net: NetClass):
    cx = build_complex(net)
    n = net.n_vertices
    theta = np.linspace(0, 2 * np.pi, 200)
    ax.plot(np.cos(theta), np.sin(theta), color="#333333", lw=1.0)
    for face in cx.inside_faces:
        pts = []
        m = len(face.vertices)
        for i, e in enumerate(face.edges):
            a0 = _vertex_angle(face.vertices[i], n)
            a1 = _vertex_angle(face.vertices[(i + 1) % m], n)
            if e.kind == "arc":
                while a1 <= a0:
                    a1 += 2 * np.pi
                arc = np.linspace(a0, a1, 24)
                pts.extend(zip(np.cos(arc), np.sin(arc)))
            else:
                pts.append((math.cos(a0), math.sin(a0)))
                pts.append((math.cos(a1), math.sin(a1)))
        if face.id == cx.distinguished.g0:
            color = _FILL_ROOT
        else:
            color = _FILL_PLUS if face.parity == 1 else _FILL_MINUS
        ax.fill([p[0] for p in pts], [p[1] for p in pts], color=color, lw=0)
    for i, j in net.matching:
        a, b = _vertex_angle(i, n), _vertex_angle(j, n)
        ax.plot([math.cos(a), math.cos(b)], [math.sin(a), math.sin(b)], color="#1a1a1a", lw=1.2)
    for k in range(1, n + 1):
        a = _vertex_angle(k, n)
        ax.plot([math.cos(a)], [math.sin(a)], "o", color="#1a1a1a", ms=3)
    ax.set_aspect("equal")
    ax.axis("off")


def fig_net_gallery(nets: list[NetClass], path):
    cols = min(len(nets), 7)
    rows = (len(nets) + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(2.0 * cols, 2.0 * rows))
    axes = np.atleast_1d(axes).ravel()
    for ax in axes:
        ax.axis("off")
    for ax, net in zip(axes, nets):
        _draw_net_axes(ax, net)
        ax.set_title(",".join(f"{i}{j}" for i, j in net.matching), fontsize=7)
    fig.suptitle(f"nets for d={nets[0].d} ({len(nets)} classes)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def fig_traced_chords(circle_points, chords_per_solution, path, title=""):
    k = len(chords_per_solution)
    cols = min(max(k, 1), 5)
    rows = (k + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(2.6 * cols, 2.6 * rows))
    axes = np.atleast_1d(axes).ravel()
    theta = np.linspace(0, 2 * np.pi, 300)
    for ax in axes:
        ax.axis("off")
    for ax, chords in zip(axes, chords_per_solution):
        ax.plot(np.cos(theta), np.sin(theta), color="#999999", lw=0.8)
        for c in chords:
            zs = np.array(c.polyline)
            ax.plot(zs.real, zs.imag, color="#2255aa", lw=1.0)
        pts = np.array(circle_points)
        ax.plot(pts.real, pts.imag, "o", color="#aa2222", ms=3)
        ax.set_aspect("equal")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def fig_residual_summary(rows, path):
    """Scatter of per-instance max residuals and realness counts."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    idx = np.arange(len(rows))
    residuals = [max(r["max_residual"], 1e-18) for r in rows]
    ax1.semilogy(idx, residuals, "o", color="#2255aa")
    ax1.axhline(1e-10, color="#aa2222", ls="--", lw=1, label="tolerance")
    ax1.set_xlabel("instance")
    ax1.set_ylabel("max residual")
    ax1.legend(fontsize=8)
    counts = [r["solutions"] for r in rows]
    expected = [r["expected"] for r in rows]
    ax2.plot(idx, counts, "o", color="#2255aa", label="found")
    ax2.plot(idx, expected, "-", color="#44aa44", lw=1, label="expected")
    ax2.set_xlabel("instance")
    ax2.set_ylabel("solution count")
    ax2.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
