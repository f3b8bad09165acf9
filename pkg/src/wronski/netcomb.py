"""Nets on the circle: non-crossing matchings, their cell complexes and dual trees.

A net of degree d is encoded by a non-crossing perfect matching of the
2d-2 circle vertices; the symmetric cell decomposition of the sphere it
induces (arcs on the circle, chords inside the disk, mirrored chords
outside) is reconstructed combinatorially from the matching alone.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache, total_ordering
from typing import Iterable


class NetStructureError(Exception):
    """A structural invariant of a net or its complex failed."""


_KIND_RANK = {"arc": 0, "chord": 1, "mirror": 2}


@total_ordering
@dataclass(frozen=True)
class EdgeId:
    """Identifier of a net edge: arc t_k, chord c{i}-{j} or mirror m{i}-{j}."""

    kind: str
    a: int
    b: int = 0

    def __post_init__(self):
        if self.kind not in _KIND_RANK:
            raise ValueError(f"unknown edge kind {self.kind!r}")
        if self.kind != "arc" and not self.a < self.b:
            raise ValueError("chord/mirror endpoints must satisfy a < b")

    @property
    def label(self) -> str:
        if self.kind == "arc":
            return f"t{self.a}"
        return f"{self.kind[0]}{self.a}-{self.b}"

    def sort_key(self):
        return (_KIND_RANK[self.kind], self.a, self.b)

    def __lt__(self, other: "EdgeId"):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        return f"EdgeId({self.label!r})"

    def endpoints(self, d: int) -> tuple[int, int]:
        """Vertex pair of this edge in a degree-d net (v_0 is vertex 2d-2)."""
        if self.kind == "arc":
            n = 2 * d - 2
            return (n if self.a == 1 else self.a - 1, self.a)
        return (self.a, self.b)

    @classmethod
    def parse(cls, text: str) -> "EdgeId":
        text = text.strip()
        if text.startswith("t"):
            return cls("arc", int(text[1:]))
        kind = {"c": "chord", "m": "mirror"}.get(text[0])
        if kind is None or "-" not in text:
            raise ValueError(f"cannot parse edge id {text!r}")
        i, j = text[1:].split("-")
        return cls(kind, int(i), int(j))


def arc(k: int) -> EdgeId:
    return EdgeId("arc", k)


def chord(i: int, j: int) -> EdgeId:
    return EdgeId("chord", min(i, j), max(i, j))


def mirror(i: int, j: int) -> EdgeId:
    return EdgeId("mirror", min(i, j), max(i, j))


def _pairs_cross(p: tuple[int, int], q: tuple[int, int]) -> bool:
    a, b = p
    c, e = q
    return (a < c < b < e) or (c < a < e < b)


@dataclass(frozen=True)
class NetClass:
    """A net equivalence class: a non-crossing perfect matching of {1..2d-2}.

    The matching is stored canonically, each pair as (small, large) and the
    pairs sorted by their smaller element.
    """

    d: int
    matching: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.d < 3:
            raise ValueError("nets require d >= 3")
        n = 2 * self.d - 2
        pairs = tuple(sorted((min(i, j), max(i, j)) for i, j in self.matching))
        object.__setattr__(self, "matching", pairs)
        seen = [v for pair in pairs for v in pair]
        if sorted(seen) != list(range(1, n + 1)):
            raise NetStructureError(f"not a perfect matching of 1..{n}: {pairs}")
        for i, p in enumerate(pairs):
            for q in pairs[i + 1 :]:
                if _pairs_cross(p, q):
                    raise NetStructureError(f"crossing pairs {p} and {q}")

    @property
    def n_vertices(self) -> int:
        return 2 * self.d - 2

    def partner(self, v: int) -> int:
        for i, j in self.matching:
            if v == i:
                return j
            if v == j:
                return i
        raise KeyError(v)

    def arcs(self) -> list[EdgeId]:
        return [arc(k) for k in range(1, self.n_vertices + 1)]

    def chords(self) -> list[EdgeId]:
        return [chord(i, j) for i, j in self.matching]

    def to_json(self) -> str:
        payload = {"d": self.d, "matching": [list(p) for p in self.matching]}
        return json.dumps(payload, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "NetClass":
        data = json.loads(text)
        return cls(int(data["d"]), tuple((int(i), int(j)) for i, j in data["matching"]))


def catalan_u(d: int) -> int:
    """Number of net classes for degree d: (1/d) * binom(2d-2, d-1)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return math.comb(2 * d - 2, d - 1) // d


def _noncrossing_matchings(points: tuple[int, ...]):
    if not points:
        yield ()
        return
    first = points[0]
    for jpos in range(1, len(points), 2):
        inside = points[1:jpos]
        outside = points[jpos + 1 :]
        for m_in in _noncrossing_matchings(inside):
            for m_out in _noncrossing_matchings(outside):
                yield ((first, points[jpos]),) + m_in + m_out


def enumerate_nets(d: int) -> list[NetClass]:
    """All non-crossing perfect matchings of 2d-2 points, lexicographically sorted."""
    if d < 3:
        raise ValueError("nets require d >= 3")
    points = tuple(range(1, 2 * d - 1))
    nets = [NetClass(d, m) for m in _noncrossing_matchings(points)]
    nets.sort(key=lambda net: net.matching)
    return nets


@dataclass(frozen=True)
class Face:
    """One face of the complex, boundary oriented with the face on the left.

    edges[i] joins vertices[i] to vertices[(i+1) % len]; parity is the sign
    assigned by the checkerboard coloring with +1 on the distinguished face.
    """

    id: int
    side: str  # "inside" | "outside"
    vertices: tuple[int, ...]
    edges: tuple[EdgeId, ...]
    parity: int

    @property
    def boundary(self) -> tuple:
        out = []
        for v, e in zip(self.vertices, self.edges):
            out.extend((v, e))
        return tuple(out)


@dataclass(frozen=True)
class Distinguished:
    """Distinguished elements of a net: the face G0 and its two marked edges."""

    g0: int
    N: int
    e1: EdgeId
    e_neg1: EdgeId
    e_prime: EdgeId
    e_double_prime: EdgeId


class DualTree:
    """Tree on the disk faces (S), optionally extended by one leaf per arc (S-hat).

    Nodes are face ids (ints) and, in the extended tree, arc EdgeIds. Each
    tree edge records the net edge it crosses.
    """

    def __init__(self, root, nodes: Iterable, edges: Iterable[tuple]):
        self.root = root
        self.nodes = list(nodes)
        self.edges = [(u, v, e) for u, v, e in edges]
        self.neighbors: dict = {n: [] for n in self.nodes}
        for u, v, e in self.edges:
            self.neighbors[u].append((v, e))
            self.neighbors[v].append((u, e))

    def check_tree(self):
        """Raise unless connected and acyclic."""
        if len(self.edges) != len(self.nodes) - 1:
            raise NetStructureError("dual graph edge count is not |nodes| - 1")
        seen = {self.root}
        stack = [self.root]
        while stack:
            u = stack.pop()
            for v, _ in self.neighbors[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) != len(self.nodes):
            raise NetStructureError("dual graph is not connected")

    def parents(self) -> dict:
        """Map node -> (parent, crossing edge), BFS from the root."""
        par = {self.root: (None, None)}
        queue = [self.root]
        while queue:
            u = queue.pop(0)
            for v, e in sorted(self.neighbors[u], key=lambda t: _node_key(t[0])):
                if v not in par:
                    par[v] = (u, e)
                    queue.append(v)
        return par

    def tree_edges(self) -> set:
        return {_edge_key(u, v) for u, v, _ in self.edges}


def _node_key(node):
    if isinstance(node, EdgeId):
        return (1,) + node.sort_key()
    return (0, node)


def _edge_key(u, v):
    ku, kv = _node_key(u), _node_key(v)
    return (ku, kv) if ku <= kv else (kv, ku)


class CellComplex:
    """The symmetric cell complex of a net: 2d-2 vertices, 4d-4 edges, 2d faces."""

    def __init__(self, net: NetClass, faces: tuple[Face, ...], distinguished: Distinguished):
        self.net = net
        self.d = net.d
        self.faces = faces
        self.distinguished = distinguished
        self.face_by_id = {f.id: f for f in faces}
        self.inside_faces = tuple(f for f in faces if f.side == "inside")
        # edge -> ids of the (one or two) inside faces adjacent to it
        self.inside_faces_of_edge: dict[EdgeId, tuple[int, ...]] = {}
        for f in self.inside_faces:
            for e in f.edges:
                self.inside_faces_of_edge.setdefault(e, ())
                self.inside_faces_of_edge[e] += (f.id,)
        self.faces_of_edge: dict[EdgeId, tuple[int, ...]] = {}
        for f in faces:
            for e in f.edges:
                self.faces_of_edge.setdefault(e, ())
                self.faces_of_edge[e] += (f.id,)

    @property
    def edges(self) -> list[EdgeId]:
        n = self.net.n_vertices
        out = [arc(k) for k in range(1, n + 1)]
        out += self.net.chords()
        out += [mirror(i, j) for i, j in self.net.matching]
        return out

    def mirror_face_id(self, face_id: int) -> int:
        f = self.face_by_id[face_id]
        target_vertices = frozenset(f.vertices)
        target_side = "outside" if f.side == "inside" else "inside"
        for g in self.faces:
            if g.side == target_side and frozenset(g.vertices) == target_vertices:
                mirrored = {_mirror_of(e) for e in f.edges}
                if set(g.edges) == mirrored:
                    return g.id
        raise NetStructureError(f"no mirror face for face {face_id}")


def _mirror_of(e: EdgeId) -> EdgeId:
    if e.kind == "arc":
        return e
    return EdgeId("mirror" if e.kind == "chord" else "chord", e.a, e.b)


def _trace_faces(net: NetClass):
    """Orbit decomposition of directed edges into faces, region on the left.

    The anticlockwise rotation at each circle vertex is (forward arc, chord,
    backward arc, mirror); the successor of a directed edge u->w is the
    rotation predecessor, at w, of the reversed edge.
    """
    n = net.n_vertices
    rot: dict[int, list[tuple[EdgeId, int]]] = {}
    for k in range(1, n + 1):
        fwd = arc(k % n + 1)  # joins v_k to v_{k+1}
        bwd = arc(k)  # joins v_{k-1} to v_k
        p = net.partner(k)
        rot[k] = [
            (fwd, k % n + 1),
            (chord(k, p), p),
            (bwd, n if k == 1 else k - 1),
            (mirror(k, p), p),
        ]
    halfedges = [(v, e, w) for v in rot for e, w in rot[v]]
    index_at = {(v, e): i for v, lst in rot.items() for i, (e, _) in enumerate(lst)}

    remaining = set(halfedges)
    faces = []
    for start in sorted(halfedges, key=lambda h: (h[0], h[1].sort_key())):
        if start not in remaining:
            continue
        cycle = []
        h = start
        while True:
            cycle.append(h)
            remaining.discard(h)
            v, e, w = h
            i = index_at[(w, e)]  # reversed edge, outgoing at w
            e2, w2 = rot[w][(i - 1) % 4]
            h = (w, e2, w2)
            if h == start:
                break
        faces.append(cycle)
    return faces


@lru_cache(maxsize=None)
def build_complex(net: NetClass) -> CellComplex:
    """Construct the cell complex of a net, with parity and distinguished elements.

    Raises NetStructureError if any structural invariant fails (face and edge
    counts, even boundaries, uniqueness of the distinguished face).
    """
    n = net.n_vertices
    cycles = _trace_faces(net)
    if len(cycles) != 2 * net.d:
        raise NetStructureError(f"expected {2 * net.d} faces, traced {len(cycles)}")

    raw = []
    for cycle in cycles:
        vertices = tuple(v for v, _, _ in cycle)
        edges = tuple(e for _, e, _ in cycle)
        if len(vertices) % 2 != 0:
            raise NetStructureError("face with odd vertex count")
        side = "outside" if any(e.kind == "mirror" for e in edges) else "inside"
        # every face of these nets carries at least one chord or mirror for d>=3,
        # and inside faces traverse their arcs anticlockwise
        raw.append((side, vertices, edges))

    raw.sort(key=lambda t: (t[0] != "inside", tuple(sorted(t[1])), tuple(sorted(e.sort_key() for e in t[2]))))
    inside = [t for t in raw if t[0] == "inside"]
    if len(inside) != net.d:
        raise NetStructureError(f"expected {net.d} inside faces, got {len(inside)}")

    # canonical starting point of each boundary cycle
    def rotate(vertices, edges):
        m = len(vertices)
        best = min(range(m), key=lambda i: (vertices[i], edges[i].sort_key()))
        return (
            vertices[best:] + vertices[:best],
            edges[best:] + edges[:best],
        )

    protofaces = []
    for fid, (side, vertices, edges) in enumerate(raw):
        v, e = rotate(vertices, edges)
        protofaces.append((fid, side, v, e))

    dist = _find_distinguished(net, protofaces)
    parity = _checkerboard(protofaces, dist.g0)

    faces = tuple(
        Face(fid, side, v, e, parity[fid]) for fid, side, v, e in protofaces
    )
    return CellComplex(net, faces, dist)


def _find_distinguished(net: NetClass, protofaces) -> Distinguished:
    n = net.n_vertices
    candidates = [
        (fid, v, e)
        for fid, side, v, e in protofaces
        if side == "inside" and len(v) >= 4 and n in v and 1 in v
    ]
    if len(candidates) != 1:
        raise NetStructureError(
            f"distinguished face not unique: {len(candidates)} candidates"
        )
    fid, vertices, edges = candidates[0]
    m = len(vertices)
    i0 = vertices.index(n)  # v_0
    if vertices[(i0 + 1) % m] != 1:
        raise NetStructureError("v_1 does not follow v_0 on the distinguished boundary")
    v_neg1 = vertices[(i0 - 1) % m]
    e1 = edges[i0]
    e_neg1 = edges[(i0 - 1) % m]
    on_circle = [e for e in (e1, e_neg1) if e.kind == "arc"]
    if len(on_circle) != 1:
        raise NetStructureError("exactly one of e_1, e_-1 must lie on the circle")
    e_prime = on_circle[0]
    e_dbl = e_neg1 if e_prime == e1 else e1
    N = v_neg1
    if not 3 <= N <= 2 * net.d - 3:
        raise NetStructureError(f"N(gamma) = {N} outside [3, {2 * net.d - 3}]")
    return Distinguished(fid, N, e1, e_neg1, e_prime, e_dbl)


def _checkerboard(protofaces, g0: int) -> dict[int, int]:
    adjacency: dict[int, set[int]] = {fid: set() for fid, *_ in protofaces}
    by_edge: dict[EdgeId, list[int]] = {}
    for fid, _, _, edges in protofaces:
        for e in edges:
            by_edge.setdefault(e, []).append(fid)
    for e, fids in by_edge.items():
        if len(fids) != 2:
            raise NetStructureError(f"edge {e.label} borders {len(fids)} faces")
        adjacency[fids[0]].add(fids[1])
        adjacency[fids[1]].add(fids[0])

    parity = {g0: 1}
    queue = [g0]
    while queue:
        u = queue.pop(0)
        for v in adjacency[u]:
            if v not in parity:
                parity[v] = -parity[u]
                queue.append(v)
            elif parity[v] != -parity[u]:
                raise NetStructureError("parity inconsistency (odd face cycle)")
    return parity


def distinguished_elements(cx: CellComplex) -> Distinguished:
    return cx.distinguished


def parity_map(cx: CellComplex) -> dict[int, int]:
    """Face id -> +-1, +1 on the distinguished face, flipping across every edge."""
    return {f.id: f.parity for f in cx.faces}


def dual_trees(cx: CellComplex) -> tuple[DualTree, DualTree]:
    """The tree S on disk faces and its extension S-hat with one leaf per arc."""
    root = cx.distinguished.g0
    s_nodes = [f.id for f in cx.inside_faces]
    s_edges = []
    for e, fids in cx.inside_faces_of_edge.items():
        if e.kind == "chord":
            if len(fids) != 2:
                raise NetStructureError(f"chord {e.label} inside-face count {len(fids)}")
            s_edges.append((fids[0], fids[1], e))
    s = DualTree(root, s_nodes, s_edges)
    s.check_tree()

    hat_nodes = list(s_nodes)
    hat_edges = list(s_edges)
    for e, fids in sorted(cx.inside_faces_of_edge.items(), key=lambda kv: kv[0].sort_key()):
        if e.kind == "arc":
            if len(fids) != 1:
                raise NetStructureError(f"arc {e.label} inside-face count {len(fids)}")
            hat_nodes.append(e)
            hat_edges.append((fids[0], e, e))
    s_hat = DualTree(root, hat_nodes, hat_edges)
    s_hat.check_tree()
    return s, s_hat


def face_order(cx: CellComplex) -> list[int]:
    """Disk face ids ordered so each face meets its predecessors in exactly one edge.

    Deterministic BFS of S from the root; refines the ancestor partial order.
    """
    s, _ = dual_trees(cx)
    order = []
    seen = set()
    queue = [s.root]
    while queue:
        u = queue.pop(0)
        if u in seen:
            continue
        seen.add(u)
        order.append(u)
        for v, _ in sorted(s.neighbors[u], key=lambda t: _node_key(t[0])):
            if v not in seen:
                queue.append(v)

    placed_edges: set[EdgeId] = set()
    for k, fid in enumerate(order):
        boundary = set(cx.face_by_id[fid].edges)
        shared = boundary & placed_edges
        if k > 0 and len(shared) != 1:
            raise NetStructureError(
                f"face {fid} shares {len(shared)} edges with its predecessors"
            )
        placed_edges |= boundary
    return order
