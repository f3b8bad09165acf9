"""Critical sequences: arc-length coordinates for circle point configurations.

A critical sequence fixes three anchors at the cube roots of unity and
records the anticlockwise arc length between consecutive points.  The
resulting polytope is a product of two simplices; its open faces are the
arc subsets validated in labelpoly.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass

from wronski.labelpoly import is_valid_w, require_valid_w
from wronski.netcomb import EdgeId, NetClass, arc, build_complex

TWO_PI = 2.0 * math.pi
OMEGA = cmath.exp(2j * math.pi / 3)

ANCHOR_TOL = 1e-9
WRAP_TOL = 1e-9


class SequenceError(Exception):
    pass


@dataclass(frozen=True)
class CriticalSequence:
    """Nonnegative arc lengths l(t_k), anchored by the net's split index N."""

    net: NetClass
    l: dict[EdgeId, float]

    def __post_init__(self):
        if set(self.l) != set(self.net.arcs()):
            raise SequenceError("sequence must label every arc exactly once")

    def check(self, tol: float = 1e-9) -> list[str]:
        N = build_complex(self.net).distinguished.N
        n = self.net.n_vertices
        third = TWO_PI / 3.0
        out = []
        if any(v < -tol for v in self.l.values()):
            out.append("negative arc length")
        if abs(self.l[arc(1)] - third) > tol:
            out.append("l(t1) != 2*pi/3")
        if abs(sum(self.l[arc(k)] for k in range(2, N + 1)) - third) > tol:
            out.append("arcs t2..tN do not sum to 2*pi/3")
        if abs(sum(self.l[arc(k)] for k in range(N + 1, n + 1)) - third) > tol:
            out.append("arcs t(N+1)..t(2d-2) do not sum to 2*pi/3")
        return out

    def to_json(self) -> str:
        return json.dumps(
            {
                "net": json.loads(self.net.to_json()),
                "l": {e.label: self.l[e] for e in sorted(self.l)},
            },
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, text: str) -> "CriticalSequence":
        data = json.loads(text)
        net = NetClass(
            int(data["net"]["d"]),
            tuple((int(i), int(j)) for i, j in data["net"]["matching"]),
        )
        return cls(net, {EdgeId.parse(k): float(v) for k, v in data["l"].items()})


def seq_from_points(net: NetClass, points) -> CriticalSequence:
    """Arc lengths of an anchored anticlockwise configuration.

    ``points[k-1]`` is the position of vertex k; the last point must be 1,
    the first the cube root of unity in the upper half plane, and the one at
    the net's split index its conjugate.  Angles are accumulated along the
    circle, so the nonstrict ordering may include coincident points.
    """
    n = net.n_vertices
    points = list(points)
    if len(points) != n:
        raise SequenceError(f"expected {n} points, got {len(points)}")
    N = build_complex(net).distinguished.N
    anchors = [
        (points[-1], 1.0 + 0.0j, "v0"),
        (points[0], OMEGA, "v1"),
        (points[N - 1], OMEGA.conjugate(), "vN"),
    ]
    for z, target, name in anchors:
        if abs(z - target) > ANCHOR_TOL:
            raise SequenceError(f"anchor {name} is {z}, expected {target}")

    thetas = []
    prev = 0.0
    for z in points:
        if abs(abs(z) - 1.0) > 1e-6:
            raise SequenceError(f"point {z} is not on the unit circle")
        angle = cmath.phase(z) % TWO_PI
        while angle < prev - WRAP_TOL:
            angle += TWO_PI
        angle = max(angle, prev)
        thetas.append(angle)
        prev = angle
    if abs(thetas[-1] - TWO_PI) > 1e-6:
        raise SequenceError("configuration does not close up anticlockwise")

    lengths = {}
    prev = 0.0
    for k, theta in enumerate(thetas, start=1):
        lengths[arc(k)] = theta - prev
        prev = theta
    return CriticalSequence(net, lengths)


def points_from_seq(seq: CriticalSequence) -> list[complex]:
    """Cumulative positions on the circle; zero arcs give repeated points."""
    problems = seq.check()
    if problems:
        raise SequenceError("; ".join(problems))
    out = []
    theta = 0.0
    for k in range(1, seq.net.n_vertices + 1):
        theta += seq.l[arc(k)]
        out.append(cmath.exp(1j * theta))
    return out


def enumerate_open_faces(net: NetClass) -> list[frozenset[EdgeId]]:
    """All arc subsets cutting out a nonempty open face, in canonical order."""
    if net.d > 6:
        raise ValueError("face enumeration is limited to d <= 6")
    all_arcs = net.arcs()
    out = []
    for mask in range(1 << len(all_arcs)):
        subset = frozenset(e for i, e in enumerate(all_arcs) if mask >> i & 1)
        if is_valid_w(net, subset):
            out.append(subset)
    out.sort(key=lambda w: (len(w), sorted(e.sort_key() for e in w)))
    return out


def face_leq(w1, w2) -> bool:
    """Closure order on open faces: containment of the arc subsets."""
    return frozenset(w1) <= frozenset(w2)


def sigma_dimension(net: NetClass) -> int:
    """Dimension of the sequence polytope, (N-2) + (2d-2-N-1)."""
    N = build_complex(net).distinguished.N
    return (N - 2) + (2 * net.d - N - 3)


__all__ = [
    "CriticalSequence",
    "SequenceError",
    "enumerate_open_faces",
    "face_leq",
    "points_from_seq",
    "require_valid_w",
    "seq_from_points",
    "sigma_dimension",
]
