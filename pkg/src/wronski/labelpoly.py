"""The labeling polytope of a net and its boundary structure.

A labeling assigns a nonnegative weight to every edge of a net, symmetric
across the circle, summing to 2*pi around each disk face, with the two
distinguished edges pinned at 2*pi/3.  Degenerate labelings (some weights
zero) collapse part of the complex; the support machinery recovers which
circle arcs survive, and the two constructors build labelings with a
prescribed support (single subset, or a nested chain of subsets).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from wronski.netcomb import (
    CellComplex,
    DualTree,
    EdgeId,
    NetClass,
    build_complex,
    dual_trees,
    face_order,
)

TWO_PI = 2.0 * math.pi
FACE_SUM_TOL = 1e-9
ZERO_TOL = 1e-12


class LabelingError(Exception):
    """Invalid labeling input or a failed labeling invariant."""


@dataclass(frozen=True)
class Labeling:
    """Edge weights on the closed disk; mirror weights are implied by symmetry."""

    net: NetClass
    p: dict[EdgeId, float]

    def __post_init__(self):
        expected = set(self.net.arcs()) | set(self.net.chords())
        if set(self.p) != expected:
            missing = expected - set(self.p)
            extra = set(self.p) - expected
            raise LabelingError(f"bad label keys: missing {missing}, extra {extra}")

    def value(self, e: EdgeId) -> float:
        if e.kind == "mirror":
            return self.p[EdgeId("chord", e.a, e.b)]
        return self.p[e]

    def to_json(self) -> str:
        labels = {e.label: self.p[e] for e in sorted(self.p)}
        return json.dumps(
            {"net": json.loads(self.net.to_json()), "p": labels},
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, text: str) -> "Labeling":
        data = json.loads(text)
        net = NetClass(
            int(data["net"]["d"]),
            tuple((int(i), int(j)) for i, j in data["net"]["matching"]),
        )
        p = {EdgeId.parse(k): float(v) for k, v in data["p"].items()}
        return cls(net, p)


def validate_labeling(lab: Labeling, tol: float = FACE_SUM_TOL) -> list[str]:
    """Empty list iff the face sums, the pinned edges and the range all hold."""
    violations = []
    cx = build_complex(lab.net)
    for e, v in sorted(lab.p.items()):
        if v < -tol or v > TWO_PI + tol:
            violations.append(f"label {e.label} = {v} outside [0, 2*pi]")
    for f in cx.inside_faces:
        total = sum(lab.p[e] for e in f.edges)
        if abs(total - TWO_PI) > tol:
            names = ",".join(e.label for e in f.edges)
            violations.append(f"face {f.id} ({names}) sums to {total}, not 2*pi")
    dist = cx.distinguished
    third = TWO_PI / 3.0
    for e in (dist.e1, dist.e_neg1):
        if abs(lab.p[e] - third) > tol:
            violations.append(f"distinguished edge {e.label} = {lab.p[e]}, not 2*pi/3")
    return violations


def labeling_dimension(net: NetClass) -> int:
    """Affine dimension of the labeling constraint system over the disk edges."""
    cx = build_complex(net)
    variables = sorted(set(net.arcs()) | set(net.chords()))
    col = {e: i for i, e in enumerate(variables)}
    rows = []
    for f in cx.inside_faces:
        row = np.zeros(len(variables))
        for e in f.edges:
            row[col[e]] += 1.0
        rows.append(row)
    for e in (cx.distinguished.e1, cx.distinguished.e_neg1):
        row = np.zeros(len(variables))
        row[col[e]] = 1.0
        rows.append(row)
    rank = np.linalg.matrix_rank(np.array(rows), tol=1e-10)
    return len(variables) - int(rank)


# ---------------------------------------------------------------------------
# support of a (possibly degenerate) labeling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SupportData:
    """Zero set, surviving region and its boundary for one labeling."""

    zero_edges: frozenset[EdgeId]  # closed-disk edges with label zero
    region_faces: frozenset[int]  # face ids (both sides) in the component of G0
    region_edges: frozenset[EdgeId]  # closed-disk edges inside the region
    e_arcs: frozenset[EdgeId]  # arcs inside the region, the set E(p)
    e_boundary: frozenset[EdgeId]  # zero edges on the region boundary, E0(p)
    arcs_form_valid_w: bool  # whether E(p) satisfies the face conditions


def support(lab: Labeling, zero_tol: float = ZERO_TOL) -> SupportData:
    """Region-growing computation of D(p), E(p) and E0(p).

    Faces connect through edges with positive label; an edge with label 2*pi
    or more inside the region trips the open-interval invariant.
    """
    cx = build_complex(lab.net)

    def positive(e: EdgeId) -> bool:
        return lab.value(e) > zero_tol

    region = {cx.distinguished.g0}
    queue = [cx.distinguished.g0]
    while queue:
        fid = queue.pop()
        for e in cx.face_by_id[fid].edges:
            if not positive(e):
                continue
            for gid in cx.faces_of_edge[e]:
                if gid not in region:
                    region.add(gid)
                    queue.append(gid)

    disk_edges = set(lab.net.arcs()) | set(lab.net.chords())
    zero_edges = frozenset(e for e in disk_edges if not positive(e))

    region_edges = set()
    e_boundary = set()
    for e in disk_edges:
        adjacent = any(fid in region for fid in cx.faces_of_edge[e])
        if positive(e):
            if adjacent:
                region_edges.add(e)
                if lab.value(e) >= TWO_PI - zero_tol:
                    raise LabelingError(
                        f"edge {e.label} inside the region has label >= 2*pi"
                    )
        elif adjacent:
            e_boundary.add(e)

    e_arcs = frozenset(e for e in region_edges if e.kind == "arc")
    return SupportData(
        zero_edges=zero_edges,
        region_faces=frozenset(region),
        region_edges=frozenset(region_edges),
        e_arcs=e_arcs,
        e_boundary=frozenset(e_boundary),
        arcs_form_valid_w=is_valid_w(lab.net, e_arcs),
    )


def predicted_support(lab: Labeling) -> frozenset[EdgeId]:
    """Arcs where the induced critical sequence is nonzero."""
    return support(lab).e_arcs


# ---------------------------------------------------------------------------
# arc subsets W and the subtree machinery of the constructive lemmas
# ---------------------------------------------------------------------------

def coerce_arcs(net: NetClass, w) -> frozenset[EdgeId]:
    out = set()
    for item in w:
        if isinstance(item, EdgeId):
            e = item
        elif isinstance(item, int):
            e = EdgeId("arc", item)
        else:
            e = EdgeId.parse(str(item))
        if e.kind != "arc" or not 1 <= e.a <= net.n_vertices:
            raise LabelingError(f"{e.label} is not an arc of this net")
        out.add(e)
    return frozenset(out)


def is_valid_w(net: NetClass, w) -> bool:
    """Whether the arc subset cuts out a nonempty open face of the sequence polytope.

    Equivalent to the distinguished-edge conditions: the arc from v_0 to v_1
    is present, and both arc runs separated by the distinguished chord meet
    the subset.
    """
    arcs = coerce_arcs(net, w)
    ks = {e.a for e in arcs}
    N = build_complex(net).distinguished.N
    n = net.n_vertices
    if 1 not in ks:
        return False
    if not ks & set(range(2, N + 1)):
        return False
    if not ks & set(range(N + 1, n + 1)):
        return False
    return True


def require_valid_w(net: NetClass, w) -> frozenset[EdgeId]:
    arcs = coerce_arcs(net, w)
    if not is_valid_w(net, arcs):
        raise LabelingError(f"invalid arc subset {sorted(e.label for e in arcs)}")
    return arcs


def _marked_subtree(s_hat: DualTree, targets: set) -> set:
    """Nodes of the minimal subtree of s_hat spanning the root and the targets."""
    parents = s_hat.parents()
    marked = {s_hat.root}
    for t in targets:
        node = t
        while node not in marked:
            marked.add(node)
            node = parents[node][0]
    return marked


def _subtree_has_edge(marked: set, u, v) -> bool:
    # a tree edge lies in the spanned subtree iff both endpoints are marked
    return u in marked and v in marked


def e0_from_w(net: NetClass, w) -> frozenset[EdgeId]:
    """Zero-boundary edge set determined by an arc subset, via the extended tree.

    Returns the edges whose dual-tree edge is outside the spanned subtree but
    touches it; this is the set on which every labeling with support W must
    vanish.
    """
    arcs = require_valid_w(net, w)
    cx = build_complex(net)
    _, s_hat = dual_trees(cx)
    marked = _marked_subtree(s_hat, set(arcs))
    out = set()
    for u, v, e in s_hat.edges:
        if _subtree_has_edge(marked, u, v):
            continue
        if u in marked or v in marked:
            out.add(e)
    return frozenset(out)


# ---------------------------------------------------------------------------
# Lemma-style constructors (exact arithmetic in multiples of pi)
# ---------------------------------------------------------------------------

def _root_face_labels(cx: CellComplex, marked: set) -> dict[EdgeId, Fraction]:
    """Labels on the distinguished face: pinned edges 2/3, the rest share 2/3."""
    dist = cx.distinguished
    g0 = cx.face_by_id[dist.g0]
    labels: dict[EdgeId, Fraction] = {
        dist.e_prime: Fraction(2, 3),
        dist.e_double_prime: Fraction(2, 3),
    }
    others = [e for e in g0.edges if e not in labels]
    in_tree = [e for e in others if _tree_edge_marked(cx, marked, e)]
    if not in_tree:
        raise LabelingError("no spanned edge on the distinguished face besides e', e''")
    share = Fraction(2, 3 * len(in_tree))
    for e in others:
        labels[e] = share if e in in_tree else Fraction(0)
    return labels


def _tree_edge_marked(cx: CellComplex, marked: set, e: EdgeId) -> bool:
    """Whether the dual edge crossing e lies in the marked subtree."""
    fids = cx.inside_faces_of_edge[e]
    if e.kind == "arc":
        return fids[0] in marked and e in marked
    return fids[0] in marked and fids[1] in marked


def lemma6_labeling(net: NetClass, w) -> Labeling:
    """Inductive construction of a labeling whose arc support is exactly W.

    Walks the disk faces outward from the distinguished one; at each face the
    already-labeled connecting chord dictates one of three cases (zero, full
    2*pi, or an even split of the remainder over the spanned edges).
    """
    arcs = require_valid_w(net, w)
    cx = build_complex(net)
    _, s_hat = dual_trees(cx)
    marked = _marked_subtree(s_hat, set(arcs))

    labels = _root_face_labels(cx, marked)
    order = face_order(cx)
    for fid in order[1:]:
        face = cx.face_by_id[fid]
        known = [e for e in face.edges if e in labels]
        if len(known) != 1:
            raise LabelingError(f"face {fid} has {len(known)} labeled edges")
        e_star = known[0]
        v_star = labels[e_star]
        rest = sorted(e for e in face.edges if e != e_star)
        if v_star == 2:
            for e in rest:
                labels[e] = Fraction(0)
        elif v_star == 0:
            e_dd = rest[0]  # smallest canonical edge id
            labels[e_dd] = Fraction(2)
            for e in rest[1:]:
                labels[e] = Fraction(0)
        else:
            in_tree = [e for e in rest if _tree_edge_marked(cx, marked, e)]
            if not in_tree:
                raise LabelingError(f"face {fid} has no spanned edge to continue")
            share = (Fraction(2) - v_star) / len(in_tree)
            for e in rest:
                labels[e] = share if e in in_tree else Fraction(0)

    return Labeling(net, {e: float(v) * math.pi for e, v in labels.items()})


def lemma7_labeling(net: NetClass, chain) -> Labeling:
    """Labeling vanishing on the combined zero boundary of a nested chain of supports.

    The chain is a sequence of arc subsets, each containing the next; a full
    arc set is prepended when absent.  The distinguished face is labeled for
    the innermost subset; every other face concentrates its remaining weight
    on a single edge spanned at that face's chain depth.
    """
    subsets = [require_valid_w(net, w) for w in chain]
    full = frozenset(net.arcs())
    if not subsets or subsets[0] != full:
        subsets.insert(0, full)
    for a, b in zip(subsets, subsets[1:]):
        if not b <= a:
            raise LabelingError("chain of arc subsets is not nested")

    cx = build_complex(net)
    _, s_hat = dual_trees(cx)
    marked_chain = [_marked_subtree(s_hat, set(ws)) for ws in subsets]

    labels = _root_face_labels(cx, marked_chain[-1])
    order = face_order(cx)
    for fid in order[1:]:
        face = cx.face_by_id[fid]
        depth = max(m for m, marked in enumerate(marked_chain) if fid in marked)
        marked = marked_chain[depth]
        known = [e for e in face.edges if e in labels]
        if len(known) != 1:
            raise LabelingError(f"face {fid} has {len(known)} labeled edges")
        e_star = known[0]
        candidates = sorted(
            e
            for e in face.edges
            if e != e_star and _tree_edge_marked(cx, marked, e)
        )
        if not candidates:
            raise LabelingError(f"face {fid} has no spanned edge at depth {depth}")
        e_dd = candidates[0]
        labels[e_dd] = Fraction(2) - labels[e_star]
        for e in face.edges:
            if e not in (e_star, e_dd):
                labels[e] = Fraction(0)

    return Labeling(net, {e: float(v) * math.pi for e, v in labels.items()})


# ---------------------------------------------------------------------------
# quotient complex of a degenerate labeling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CollapsedComplex:
    """Quotient of the net complex with each collapsed component a single point."""

    vertex_names: tuple[str, ...]
    degrees: dict[str, int]
    edges: tuple[tuple[EdgeId, str, str], ...]
    faces: tuple[tuple[int, tuple, ...], ...]

    @property
    def euler_characteristic(self) -> int:
        return len(self.vertex_names) - len(self.edges) + len(self.faces)


def collapse_complex(lab: Labeling, zero_tol: float = ZERO_TOL) -> CollapsedComplex:
    """Identify every connected component outside the surviving region to a point."""
    cx = build_complex(lab.net)
    sup = support(lab, zero_tol)
    n = lab.net.n_vertices

    region_mirrors = {
        EdgeId("mirror", e.a, e.b) for e in sup.region_edges if e.kind == "chord"
    }
    region_all_edges = set(sup.region_edges) | region_mirrors

    def vertex_edges(v: int) -> list[EdgeId]:
        p = lab.net.partner(v)
        return [
            EdgeId("arc", v % n + 1),
            EdgeId("arc", v),
            EdgeId("chord", min(v, p), max(v, p)),
            EdgeId("mirror", min(v, p), max(v, p)),
        ]

    region_vertices = set()
    for v in range(1, n + 1):
        if all(lab.value(e) > zero_tol for e in vertex_edges(v)):
            if any(
                fid in sup.region_faces
                for e in vertex_edges(v)
                for fid in cx.faces_of_edge[e]
            ):
                region_vertices.add(v)

    # union-find over the collapsed cells
    parent: dict = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    b_vertices = [("v", v) for v in range(1, n + 1) if v not in region_vertices]
    b_edges = [("e", e) for e in cx.edges if e not in region_all_edges]
    b_faces = [("f", f.id) for f in cx.faces if f.id not in sup.region_faces]
    for cell in b_vertices + b_edges + b_faces:
        parent[cell] = cell
    for _, e in b_edges:
        for v in e.endpoints(lab.net.d):
            if ("v", v) in parent:
                union(("e", e), ("v", v))
    for _, fid in b_faces:
        for e in cx.face_by_id[fid].edges:
            union(("f", fid), ("e", e))

    components = sorted({find(c) for c in parent})
    comp_name = {c: f"w{i}" for i, c in enumerate(components)}

    def image(v: int) -> str:
        if v in region_vertices:
            return f"v{v}"
        return comp_name[find(("v", v))]

    vertex_names = tuple(
        sorted({f"v{v}" for v in region_vertices} | set(comp_name.values()))
    )

    out_edges = []
    for e in sorted(region_all_edges):
        a, b = e.endpoints(lab.net.d)
        out_edges.append((e, image(a), image(b)))

    out_faces = []
    for fid in sorted(sup.region_faces):
        face = cx.face_by_id[fid]
        boundary = []
        for v, e in zip(face.vertices, face.edges):
            img = image(v)
            if not boundary or boundary[-1] != img:
                boundary.append(img)
            if e in region_all_edges:
                boundary.append(e)
        if len(boundary) > 1 and boundary[0] == boundary[-1]:
            boundary.pop()
        out_faces.append((fid, tuple(boundary)))

    degrees: dict[str, int] = {name: 0 for name in vertex_names}
    for _, a, b in out_edges:
        degrees[a] += 1
        degrees[b] += 1

    return CollapsedComplex(
        vertex_names=vertex_names,
        degrees=degrees,
        edges=tuple(out_edges),
        faces=tuple(out_faces),
    )
