"""Classify a solved rational map by tracing its unit-circle preimage.

Inside the disk, the level set |F| = 1 of a circle-preserving map with
simple circle critical points consists of disjoint curves entering at one
critical point and leaving at another.  Tracing each curve recovers the
non-crossing matching (the net class); the edge labels then come from the
critical values of the properly normalized map.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from wronski.labelpoly import Labeling, validate_labeling
from wronski.netcomb import EdgeId, NetClass, build_complex, enumerate_nets
from wronski.numcore import (
    CAYLEY,
    NormalizedMap,
    RationalMap,
    cayley_transport,
    normalize_to_rstar,
    poly_derivative,
    real_basis,
)

TWO_PI = 2.0 * math.pi


class TraceError(Exception):
    pass


class _RefineNeeded(Exception):
    """Internal: landing was ambiguous at the current resolution."""


@dataclass(frozen=True)
class TraceConfig:
    step: float = 1e-3
    correction_tol: float = 1e-10
    landing_radius: float = 1e-4
    max_steps: int = 10**6

    def __post_init__(self):
        if min(self.step, self.correction_tol, self.landing_radius) <= 0:
            raise ValueError("trace parameters must be positive")
        if self.landing_radius <= self.correction_tol:
            raise ValueError("landing radius must exceed the correction tolerance")

    def refined(self) -> "TraceConfig":
        return TraceConfig(
            step=self.step / 4.0,
            correction_tol=self.correction_tol,
            landing_radius=self.landing_radius / 4.0,
            max_steps=self.max_steps,
        )


@dataclass(frozen=True)
class TracedChord:
    start_vertex: int
    end_vertex: int
    polyline: tuple[complex, ...]


def _horner(coeffs, z: complex) -> complex:
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


class _LevelTracer:
    """Scalar-arithmetic helper around log|F| and its gradient."""

    def __init__(self, func: RationalMap):
        self.num = tuple(complex(c) for c in func.num)
        self.den = tuple(complex(c) for c in func.den)
        self.dnum = tuple(complex(c) for c in poly_derivative(self.num))
        self.dden = tuple(complex(c) for c in poly_derivative(self.den))

    def height(self, z: complex) -> float:
        """log |F(z)|."""
        n = _horner(self.num, z)
        d = _horner(self.den, z)
        if n == 0 or d == 0:
            return -math.inf if n == 0 else math.inf
        return 0.5 * math.log((n.real**2 + n.imag**2) / (d.real**2 + d.imag**2))

    def gradient(self, z: complex) -> complex:
        """Gradient of log|F| as a complex number, conj(F'/F)."""
        n = _horner(self.num, z)
        d = _horner(self.den, z)
        dn = _horner(self.dnum, z)
        dd = _horner(self.dden, z)
        return (dn / n - dd / d).conjugate()

    def correct(self, z: complex, tol: float) -> complex | None:
        for _ in range(12):
            h = self.height(z)
            if abs(h) < tol:
                return z
            g = self.gradient(z)
            g2 = g.real**2 + g.imag**2
            if not math.isfinite(g2) or g2 < 1e-300:
                return None
            z = z - h * g / g2
        return z if abs(self.height(z)) < tol else None


def _trace_one_chord(tracer: _LevelTracer, crit, start_index: int, cfg: TraceConfig):
    """Follow the inward branch of |F| = 1 from one critical point to another.

    At a simple circle critical point the level set crosses the circle at a
    right angle, so the branch leaves along the inward normal.
    """
    n = len(crit)
    v = crit[start_index]
    launch = max(4.0 * cfg.landing_radius, min(cfg.step, 1e-2))
    z = v * (1.0 - launch)
    z = tracer.correct(z, cfg.correction_tol)
    if z is None:
        raise TraceError(f"could not start the trace at vertex {start_index + 1}")
    prev_dir = -v / abs(v)
    polyline = [v, z]

    for _ in range(cfg.max_steps):
        g = tracer.gradient(z)
        mag = abs(g)
        if not math.isfinite(mag) or mag < 1e-300:
            raise TraceError("vanishing gradient while tracing")
        tangent = 1j * g / mag
        if (tangent * prev_dir.conjugate()).real < 0:
            tangent = -tangent
        gap = 1.0 - abs(z)
        h_eff = min(cfg.step, max(0.25 * gap, cfg.landing_radius / 4.0))
        candidate = tracer.correct(z + tangent * h_eff, cfg.correction_tol)
        tries = 0
        while candidate is None and tries < 8:
            h_eff /= 2.0
            candidate = tracer.correct(z + tangent * h_eff, cfg.correction_tol)
            tries += 1
        if candidate is None:
            raise TraceError("corrector failed along the trace")
        prev_dir = tangent
        z = candidate
        polyline.append(z)

        if 1.0 - abs(z) < cfg.landing_radius and abs(z - v) > launch + 5 * cfg.landing_radius:
            dists = sorted(range(n), key=lambda j: abs(z - crit[j]))
            nearest, second = dists[0], dists[1]
            if abs(z - crit[nearest]) > 8 * cfg.landing_radius:
                raise _RefineNeeded("trace grazed the circle away from a vertex")
            if abs(z - crit[second]) < 2 * cfg.landing_radius:
                raise _RefineNeeded("two candidate landing vertices")
            if nearest == start_index:
                raise TraceError("trace returned to its starting vertex")
            polyline.append(crit[nearest])
            return nearest, tuple(polyline)

    raise TraceError("no landing within the step budget")


def trace_chords(
    func: RationalMap, crit_points, config: TraceConfig | None = None
) -> list[TracedChord]:
    """All level-set chords of a circle-model map, each confirmed from both ends.

    Landing ambiguities trigger a bounded refinement of the step and landing
    radius; an inconsistent pairing after refinement is an error.
    """
    cfg = config or TraceConfig()
    crit = [complex(z) for z in crit_points]
    for z in crit:
        if abs(abs(z) - 1.0) > 1e-6:
            raise TraceError(f"critical point {z} is not on the unit circle")
    tracer = _LevelTracer(func)

    for attempt in range(4):
        try:
            landings = []
            polylines = []
            for i in range(len(crit)):
                j, poly = _trace_one_chord(tracer, crit, i, cfg)
                landings.append(j)
                polylines.append(poly)
            bad = [i for i, j in enumerate(landings) if landings[j] != i or j == i]
            if bad:
                raise _RefineNeeded(f"pairing mismatch at vertices {bad}")
            chords = []
            for i, j in enumerate(landings):
                if i < j:
                    chords.append(
                        TracedChord(
                            start_vertex=i + 1,
                            end_vertex=j + 1,
                            polyline=polylines[i],
                        )
                    )
            return chords
        except _RefineNeeded as exc:
            last = exc
            cfg = cfg.refined()
    raise TraceError(f"tracing did not stabilize under refinement: {last}")


def _circle_model(plane, problem) -> tuple[RationalMap, list[complex]]:
    r0, r1 = real_basis(plane)
    f = RationalMap.from_polys(r0, r1)
    func = cayley_transport(f)
    circle_pts = [CAYLEY(complex(x).real) for x in problem.points]
    return func, circle_pts


def classify_net(plane, problem, config: TraceConfig | None = None) -> NetClass:
    """Net class of a solution plane: trace the chords, read off the matching.

    Vertex k is the image of the k-th prescribed critical point; the base
    vertex is the image of the last one.
    """
    if problem.d < 3:
        raise TraceError("net classes need d >= 3")
    func, circle_pts = _circle_model(plane, problem)
    chords = trace_chords(func, circle_pts, config)
    matching = tuple((c.start_vertex, c.end_vertex) for c in chords)
    return NetClass(problem.d, matching)


def _ordered_circle_positions(func: RationalMap, n: int) -> list[complex]:
    crit = func.critical_points()
    if len(crit) != n:
        raise TraceError(f"expected {n} critical points, found {len(crit)}")
    for z in crit:
        if abs(abs(z) - 1.0) > 1e-6:
            raise TraceError("critical point off the unit circle")
    base = min(range(n), key=lambda i: abs(crit[i] - 1.0))
    if abs(crit[base] - 1.0) > 1e-6:
        raise TraceError("no critical point at 1; map is not normalized")
    rest = sorted(
        (z for i, z in enumerate(crit) if i != base),
        key=lambda z: cmath.phase(z) % TWO_PI,
    )
    return rest + [crit[base]]


def extract_labeling(
    func: RationalMap, net: NetClass, positions=None, face_sum_tol: float = 1e-8
) -> Labeling:
    """Edge labels of a normalized circle map with the given net.

    Each edge, oriented by the boundary of its positively colored face, maps
    onto a circle arc; the label is that arc's anticlockwise length, read
    from the values at the edge endpoints.  Face sums off 2*pi signal an
    inconsistent normalization and are an error.
    """
    cx = build_complex(net)
    n = net.n_vertices
    pos = list(positions) if positions is not None else _ordered_circle_positions(func, n)
    if len(pos) != n:
        raise TraceError(f"need {n} vertex positions")
    values = [complex(func(z)) for z in pos]

    orientation: dict[EdgeId, tuple[int, int]] = {}
    for face in cx.faces:
        if face.parity != 1:
            continue
        m = len(face.vertices)
        for i, e in enumerate(face.edges):
            if e.kind != "mirror":
                orientation[e] = (face.vertices[i], face.vertices[(i + 1) % m])

    p = {}
    for e, (u, w) in orientation.items():
        start, end = values[u - 1], values[w - 1]
        length = (cmath.phase(end) - cmath.phase(start)) % TWO_PI
        p[e] = length
    lab = Labeling(net, p)

    for face in cx.inside_faces:
        total = sum(lab.p[e] for e in face.edges)
        if abs(total - TWO_PI) > face_sum_tol:
            raise TraceError(
                f"face {face.id} labels sum to {total}, not 2*pi: "
                "tracing or normalization is inconsistent"
            )
    return lab


def labeled_solution(
    plane, problem, config: TraceConfig | None = None
) -> tuple[NetClass, Labeling, NormalizedMap]:
    """Classify a solution and extract its labeling in one pass."""
    net = classify_net(plane, problem, config)
    func, circle_pts = _circle_model(plane, problem)
    n = net.n_vertices
    split = build_complex(net).distinguished.N
    norm = normalize_to_rstar(func, circle_pts, (n - 1, 0, split - 1))
    lab = extract_labeling(norm.func, net, positions=list(norm.critical_points))
    return net, lab, norm


# ---------------------------------------------------------------------------
# full round trip
# ---------------------------------------------------------------------------

@dataclass
class RoundtripReport:
    d: int
    solution_count: int
    expected_count: int
    nets_distinct: bool
    nets_cover_all: bool
    labelings_valid: list[bool]
    label_violations: list[list[str]]
    solver_failures: list[str]
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and not self.solver_failures

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "solution_count": self.solution_count,
            "expected_count": self.expected_count,
            "nets_distinct": self.nets_distinct,
            "nets_cover_all": self.nets_cover_all,
            "labelings_valid": self.labelings_valid,
            "label_violations": self.label_violations,
            "solver_failures": self.solver_failures,
            "failures": self.failures,
            "passed": self.passed,
        }


def roundtrip_check(
    problem, solve_config=None, trace_config=None, solutions=None
) -> RoundtripReport:
    """Solve, classify every solution, extract and validate every labeling.

    An already computed solution set may be passed to avoid re-solving.
    """
    from wronski.solver import solve_shapiro, verify_theorems

    sols = solutions if solutions is not None else solve_shapiro(problem, solve_config)
    theorem_report = verify_theorems(problem, sols)

    failures = []
    nets = []
    labels_valid = []
    violations = []
    for i, sol in enumerate(sols.solutions):
        try:
            net, lab, _ = labeled_solution(sol.plane, problem, trace_config)
        except (TraceError, Exception) as exc:  # noqa: BLE001 - report, never drop
            failures.append(f"solution {i}: {exc}")
            labels_valid.append(False)
            violations.append([str(exc)])
            continue
        nets.append(net)
        offenses = validate_labeling(lab, tol=1e-8)
        violations.append(offenses)
        labels_valid.append(not offenses)
        if offenses:
            failures.append(f"solution {i}: invalid labeling: {offenses}")

    distinct = len(set(nets)) == len(nets)
    expected_nets = set(enumerate_nets(problem.d)) if problem.d >= 3 else set()
    cover = set(nets) == expected_nets
    if not distinct:
        failures.append("net classes are not pairwise distinct")
    if not cover:
        failures.append("net classes do not cover the full enumeration")

    return RoundtripReport(
        d=problem.d,
        solution_count=len(sols.solutions),
        expected_count=theorem_report.expected_count,
        nets_distinct=distinct,
        nets_cover_all=cover,
        labelings_valid=labels_valid,
        label_violations=violations,
        solver_failures=theorem_report.failures,
        failures=failures,
    )
