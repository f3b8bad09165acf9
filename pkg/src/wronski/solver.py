"""Homotopy continuation solver for prescribed real critical points.

Unknowns live in the big cell of the space of 2-planes: a monic degree-d
polynomial with no z^(d-1) term paired with a monic degree-(d-1) polynomial.
Every plane whose Wronskian vanishes at 2d-2 distinct prescribed points has
a basis of exactly this shape (a lower-degree second row would force the
Wronskian degree below 2d-2), so the chart misses nothing; an optional
solve in a reparametrized frame guards against numerically lost paths.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from wronski.netcomb import catalan_u
from wronski.numcore import (
    CAYLEY,
    Mobius,
    NumericError,
    Plane2,
    is_real_plane,
    mobius_substitute,
    plucker_distance,
    poly_eval,
    poly_roots,
    wronskian,
)

MIN_SEPARATION = 1e-6


class SolveError(Exception):
    pass


@dataclass(frozen=True)
class ShapiroProblem:
    """2d-2 prescribed critical points on the real line."""

    d: int
    points: tuple[complex, ...]

    def __post_init__(self):
        if self.d < 2:
            raise SolveError("need d >= 2")
        pts = tuple(complex(x) for x in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) != 2 * self.d - 2:
            raise SolveError(f"need {2 * self.d - 2} critical points, got {len(pts)}")
        for x in pts:
            if abs(x.imag) > 0:
                raise SolveError("critical points must be real; use unchecked() to bypass")
        reals = [x.real for x in pts]
        if any(b - a <= MIN_SEPARATION for a, b in zip(reals, reals[1:])):
            raise SolveError("critical points must increase with separation > 1e-6")

    @classmethod
    def unchecked(cls, d: int, points) -> "ShapiroProblem":
        """Bypass validation, for experiments that break the realness hypothesis."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "d", d)
        object.__setattr__(obj, "points", tuple(complex(x) for x in points))
        return obj

    @classmethod
    def from_circle_points(cls, d: int, circle_points) -> tuple["ShapiroProblem", float]:
        """Transport distinct anticlockwise circle points to the real-line model.

        Rotates the configuration so no point sits near 1 (the Cayley pole),
        then applies the inverse Cayley map.  Returns the problem and the
        rotation angle used.
        """
        pts = [complex(z) for z in circle_points]
        angles = sorted(cmath.phase(z) % (2 * math.pi) for z in pts)
        gaps = [
            (angles[(i + 1) % len(angles)] - angles[i]) % (2 * math.pi)
            for i in range(len(angles))
        ]
        widest = int(np.argmax(gaps))
        alpha = (angles[widest] + gaps[widest] / 2.0) % (2 * math.pi)
        rotated = [z * cmath.exp(-1j * alpha) for z in pts]
        reals = sorted((CAYLEY.inverse()(z).real for z in rotated))
        return cls(d, tuple(reals)), alpha


@dataclass(frozen=True)
class SolveConfig:
    seed: int = 0
    initial_step: float = 0.02
    max_step: float = 0.1
    min_step: float = 1e-13
    corrector_iterations: int = 3
    corrector_tol: float = 1e-10
    max_path_steps: int = 3000
    divergence_norm: float = 1e8
    plucker_separation: float = 1e-6
    residual_tol: float = 1e-10
    realness_ratio: float = 1e-8
    mobius_pass: str = "auto"  # "auto" | "always" | "never"


@dataclass(frozen=True)
class Solution:
    plane: Plane2
    residual: float
    is_real: bool


@dataclass
class SolutionSet:
    problem: ShapiroProblem
    solutions: list[Solution]
    diagnostics: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.solutions)

    def planes(self) -> list[Plane2]:
        return [s.plane for s in self.solutions]


class WronskianSystem:
    """The square bilinear system W(p, q)(x_i) = 0 over the big-cell chart."""

    def __init__(self, problem: ShapiroProblem):
        self.problem = problem
        d = problem.d
        x = np.asarray(problem.points, dtype=complex)
        m = 2 * d - 2
        ks = np.arange(d - 1)
        self.d = d
        self.n_unknowns = m
        self.powers = x[:, None] ** ks  # (m, d-1)
        self.dpowers = np.zeros_like(self.powers)
        if d >= 2:
            self.dpowers[:, 1:] = ks[1:] * x[:, None] ** (ks[1:] - 1)
        self.p_lead = x**d
        self.dp_lead = d * x ** (d - 1)
        self.q_lead = x ** (d - 1)
        self.dq_lead = (d - 1) * x ** (d - 2)

    def _parts(self, u: np.ndarray):
        k = self.d - 1
        a, b = u[..., :k], u[..., k:]
        p = self.p_lead + a @ self.powers.T
        dp = self.dp_lead + a @ self.dpowers.T
        q = self.q_lead + b @ self.powers.T
        dq = self.dq_lead + b @ self.dpowers.T
        return p, dp, q, dq

    def eval(self, u: np.ndarray) -> np.ndarray:
        """System values; u may carry leading batch dimensions."""
        p, dp, q, dq = self._parts(u)
        return p * dq - dp * q

    def jacobian(self, u: np.ndarray) -> np.ndarray:
        """Jacobian, batched over any leading dimensions of u."""
        p, dp, q, dq = self._parts(u)
        ja = self.powers * dq[..., :, None] - self.dpowers * q[..., :, None]
        jb = self.dpowers * p[..., :, None] - self.powers * dp[..., :, None]
        return np.concatenate([ja, jb], axis=-1)

    def polys_from(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        k = self.d - 1
        p = np.zeros(self.d + 1, dtype=complex)
        p[:k] = u[:k]
        p[self.d] = 1.0
        q = np.zeros(self.d, dtype=complex)
        q[:k] = u[k:]
        q[self.d - 1] = 1.0
        return p, q

    def plane_from(self, u: np.ndarray) -> Plane2:
        p, q = self.polys_from(u)
        return Plane2.from_polys(p, q, self.d)

    def residual_of(self, u: np.ndarray) -> float:
        """Max |W(p,q)(x_i)| relative to the Wronskian coefficient scale."""
        p, q = self.polys_from(u)
        w = wronskian(p, q)
        scale = max(1.0, float(np.max(np.abs(w))))
        values = np.abs(poly_eval(w, np.asarray(self.problem.points, dtype=complex)))
        return float(np.max(values)) / scale


def build_system(problem: ShapiroProblem) -> WronskianSystem:
    return WronskianSystem(problem)


def _newton_polish(system: WronskianSystem, u: np.ndarray, iterations: int = 25):
    for _ in range(iterations):
        f = system.eval(u)
        try:
            step = np.linalg.solve(system.jacobian(u), -f)
        except np.linalg.LinAlgError:
            return None
        u = u + step
        if np.linalg.norm(step) < 1e-14 * (1.0 + np.linalg.norm(u)):
            break
    return u


ENDGAME_GAP = 1e-6  # hand a path to the endpoint Newton once this close to t = 1
MAX_FAILS_IN_A_ROW = 50


def _diag_batch(v: np.ndarray) -> np.ndarray:
    k, m = v.shape
    out = np.zeros((k, m, m), dtype=complex)
    out[:, np.arange(m), np.arange(m)] = v
    return out


def _safe_batch_solve(a: np.ndarray, b: np.ndarray):
    """Batched linear solve that marks singular or non-finite members instead of raising."""
    ok = np.isfinite(a).all(axis=(1, 2)) & np.isfinite(b).all(axis=1)
    dets = np.zeros(len(a), dtype=complex)
    with np.errstate(all="ignore"):
        if ok.any():
            dets[ok] = np.linalg.det(a[ok])
    ok &= np.isfinite(dets) & (np.abs(dets) > 1e-280)
    out = np.zeros_like(b)
    if ok.any():
        out[ok] = np.linalg.solve(a[ok], b[ok][:, :, None])[:, :, 0]
    return out, ok


def _track_all_paths(system, starts, gamma, c, cfg: SolveConfig):
    """Advance every start root toward t = 1 in lockstep.

    Each path keeps its own adaptive step (Euler predictor, Newton
    corrector); paths exceeding the norm cutoff or stalling in repeated
    halvings are dropped as divergent.  Returns the path states and a mask
    of the ones that reached the endgame gap.
    """
    K, m = starts.shape
    u = starts.astype(complex).copy()
    t = np.zeros(K)
    dt = np.full(K, cfg.initial_step)
    fails = np.zeros(K, dtype=int)
    alive = np.ones(K, dtype=bool)
    ready = np.zeros(K, dtype=bool)

    for _ in range(cfg.max_path_steps):
        if not alive.any():
            break
        idx = np.nonzero(alive)[0]
        uu = u[idx]
        tt = t[idx]
        dd = np.minimum(dt[idx], 1.0 - tt)

        with np.errstate(all="ignore"):
            g = uu * uu - c
            pred_hu = (1.0 - tt)[:, None, None] * gamma * _diag_batch(2.0 * uu)
            pred_hu += tt[:, None, None] * system.jacobian(uu)
            ht = system.eval(uu) - gamma * g
            du, solvable = _safe_batch_solve(pred_hu, -ht)
            v = uu + du * dd[:, None]
            t_try = tt + dd

            conv = np.zeros(len(idx), dtype=bool)
            for _ in range(cfg.corrector_iterations):
                gv = v * v - c
                hval = (1.0 - t_try)[:, None] * gamma * gv + t_try[:, None] * system.eval(v)
                hu = (1.0 - t_try)[:, None, None] * gamma * _diag_batch(2.0 * v)
                hu += t_try[:, None, None] * system.jacobian(v)
                step, ok = _safe_batch_solve(hu, -hval)
                v = v + step
                norms = np.linalg.norm(step, axis=1)
                conv |= ok & (norms < cfg.corrector_tol * (1.0 + np.linalg.norm(v, axis=1)))

        accept = conv & solvable & np.isfinite(v).all(axis=1)
        acc = idx[accept]
        u[acc] = v[accept]
        t[acc] = t_try[accept]
        dt[acc] = np.minimum(dt[acc] * 2.0, cfg.max_step)
        fails[acc] = 0
        rej = idx[~accept]
        dt[rej] *= 0.5
        fails[rej] += 1

        with np.errstate(all="ignore"):
            too_big = np.linalg.norm(np.nan_to_num(u[idx], nan=np.inf, posinf=np.inf), axis=1)
        dead = (
            (too_big > cfg.divergence_norm)
            | (dt[idx] < cfg.min_step)
            | (fails[idx] > MAX_FAILS_IN_A_ROW)
            | ~np.isfinite(u[idx]).all(axis=1)
        )
        alive[idx[dead]] = False
        arrived = (1.0 - t[idx] <= ENDGAME_GAP) & ~dead
        ready[idx[arrived]] = True
        alive[idx[arrived]] = False

    return u, ready


def _batch_polish(system, u: np.ndarray, iterations: int = 30) -> np.ndarray:
    """Newton on the target system for a batch of endgame points."""
    u = u.copy()
    for _ in range(iterations):
        with np.errstate(all="ignore"):
            f = system.eval(u)
            j = system.jacobian(u)
            step, ok = _safe_batch_solve(j, -f)
            u = u + step
        done = ~ok | (
            np.linalg.norm(step, axis=1) < 1e-14 * (1.0 + np.linalg.norm(u, axis=1))
        )
        if done.all():
            break
    return u


def _near_d1(system: WronskianSystem, u: np.ndarray) -> bool:
    """Common-root detection between the chart polynomials."""
    p, q = system.polys_from(u)
    try:
        q_roots = poly_roots(q)
    except NumericError:
        return True
    scale = max(1.0, float(np.max(np.abs(p))))
    return any(abs(complex(poly_eval(p, z))) < 1e-8 * scale for z in q_roots)


def _plucker_sort_key(plane: Plane2):
    v = np.round(plane.plucker(), 9)
    return tuple(float(x) for pair in zip(v.real, v.imag) for x in pair)


def _random_increasing_mobius(rng, points):
    """A real Moebius map, increasing and finite on the given points."""
    lo = min(x.real for x in points)
    hi = max(x.real for x in points)
    pole = hi + 1.0 + float(rng.uniform(0.5, 3.0))
    alpha = float(rng.normal())
    beta = float(rng.uniform(0.5, 2.0))
    # x -> alpha + beta / (pole - x), increasing on (-inf, pole)
    return Mobius.from_matrix([[-alpha, alpha * pole + beta], [-1.0, pole]])


def transport_plane(plane: Plane2, mob: Mobius) -> Plane2:
    """The plane of p(M(z)) * (denominator)^d over all p in the plane."""
    rows = [mobius_substitute(row, mob, plane.d) for row in plane.basis_array]
    return Plane2.from_rows(np.vstack(rows), plane.d)


def solve_shapiro(problem: ShapiroProblem, config: SolveConfig | None = None) -> SolutionSet:
    """All planes with the prescribed critical points, by total-degree homotopy.

    Tracks 2^(2d-2) paths from the start system u_i^2 = c_i with a random
    path constant, polishes and deduplicates the endpoints, and (depending
    on config.mobius_pass) re-solves in a random real reparametrization to
    recover anything a lost path might have missed.
    """
    cfg = config or SolveConfig()
    rng = np.random.default_rng(cfg.seed)
    diag = {
        "paths_tracked": 0,
        "paths_diverged": 0,
        "paths_failed_polish": 0,
        "duplicates_merged": 0,
        "near_d1_discarded": 0,
        "residual_rejected": 0,
        "ambiguous_merges": [],
        "mobius_pass_used": False,
    }

    endpoints = _solve_chart(problem, cfg, rng, diag)

    expected = catalan_u(problem.d)
    want_pass = cfg.mobius_pass == "always" or (
        cfg.mobius_pass == "auto" and len(endpoints) != expected
    )
    if want_pass:
        diag["mobius_pass_used"] = True
        mob = _random_increasing_mobius(rng, problem.points)
        moved = sorted(mob(x).real for x in problem.points)
        shifted = ShapiroProblem(problem.d, tuple(moved))
        sub_diag = dict(diag)
        extra = _solve_chart(shifted, cfg, rng, sub_diag)
        for key in ("paths_tracked", "paths_diverged", "paths_failed_polish"):
            diag[key] = sub_diag[key]
        system = build_system(problem)
        for plane in extra:
            back = transport_plane(plane, mob)
            u = _chart_coordinates(problem, back)
            if u is None:
                continue
            polished = _newton_polish(system, u)
            if polished is None:
                continue
            candidate = system.plane_from(polished)
            if all(
                plucker_distance(candidate, p) > cfg.plucker_separation
                for p in endpoints
            ):
                if system.residual_of(polished) < cfg.residual_tol:
                    endpoints.append(candidate)

    system = build_system(problem)
    solutions = []
    for plane in endpoints:
        u = _chart_coordinates(problem, plane)
        residual = system.residual_of(u) if u is not None else math.inf
        solutions.append(
            Solution(
                plane=plane,
                residual=residual,
                is_real=is_real_plane(plane, cfg.realness_ratio),
            )
        )
    solutions.sort(key=lambda s: _plucker_sort_key(s.plane))
    return SolutionSet(problem, solutions, diag)


def _solve_chart(problem, cfg, rng, diag) -> list[Plane2]:
    system = build_system(problem)
    m = system.n_unknowns
    gamma = cmath.exp(2j * math.pi * rng.random())
    c = (0.5 + rng.random(m)) * np.exp(2j * math.pi * rng.random(m))
    base_roots = np.sqrt(c)

    signs = np.array(
        [[1.0 if mask >> i & 1 else -1.0 for i in range(m)] for mask in range(1 << m)]
    )
    starts = base_roots[None, :] * signs
    diag["paths_tracked"] += len(starts)
    u_end, ready = _track_all_paths(system, starts, gamma, c, cfg)
    diag["paths_diverged"] += int((~ready).sum())

    raw_endpoints = []
    if ready.any():
        polished = _batch_polish(system, u_end[ready])
        for u in polished:
            if not np.all(np.isfinite(u)) or system.residual_of(u) > cfg.residual_tol:
                diag["paths_failed_polish"] += 1
                continue
            raw_endpoints.append(u)

    planes: list[Plane2] = []
    for u in raw_endpoints:
        if _near_d1(system, u):
            diag["near_d1_discarded"] += 1
            continue
        plane = system.plane_from(u)
        merged = False
        for other in planes:
            dist = plucker_distance(plane, other)
            if dist <= cfg.plucker_separation:
                diag["duplicates_merged"] += 1
                merged = True
                break
            if dist < 10 * cfg.plucker_separation:
                diag["ambiguous_merges"].append(dist)
        if not merged:
            planes.append(plane)
    return planes


def _chart_coordinates(problem: ShapiroProblem, plane: Plane2):
    """Invert the big-cell chart: basis (z^d + ... , z^(d-1) + ...)."""
    d = plane.d
    b = plane.basis_array
    lead = b[:, d]
    # row combination with zero z^d coefficient
    if abs(lead[0]) >= abs(lead[1]):
        q_raw = b[1] - b[0] * (lead[1] / lead[0])
        p_raw = b[0] / lead[0]
    else:
        q_raw = b[0] - b[1] * (lead[0] / lead[1])
        p_raw = b[1] / lead[1]
    if abs(q_raw[d - 1]) < 1e-12 * np.max(np.abs(q_raw)):
        return None  # outside the chart
    q = q_raw / q_raw[d - 1]
    p = p_raw - q * p_raw[d - 1]
    u = np.concatenate([p[: d - 1], q[: d - 1]])
    return u


# ---------------------------------------------------------------------------
# verification report
# ---------------------------------------------------------------------------

@dataclass
class TheoremReport:
    d: int
    expected_count: int
    found_count: int
    count_ok: bool
    real_flags: list[bool]
    residuals: list[float]
    critical_point_errors: list[float]
    failures: list[str]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "expected_count": self.expected_count,
            "found_count": self.found_count,
            "count_ok": self.count_ok,
            "real_flags": self.real_flags,
            "residuals": self.residuals,
            "critical_point_errors": self.critical_point_errors,
            "failures": self.failures,
            "passed": self.passed,
        }


def verify_theorems(
    problem: ShapiroProblem,
    sols: SolutionSet,
    residual_tol: float = 1e-10,
    crit_tol: float = 1e-8,
) -> TheoremReport:
    """Count, realness and critical-point checks; failures are reported, not raised."""
    from wronski.numcore import critical_points as plane_critical_points

    expected = catalan_u(problem.d)
    failures = []
    found = len(sols.solutions)
    count_ok = found == expected
    if not count_ok:
        failures.append(f"found {found} planes, expected {expected}")

    real_flags, residuals, crit_errors = [], [], []
    target = sorted(problem.points, key=lambda z: (z.real, z.imag))
    for i, sol in enumerate(sols.solutions):
        real_flags.append(sol.is_real)
        if not sol.is_real:
            failures.append(f"solution {i} is not a real plane")
        residuals.append(sol.residual)
        if sol.residual > residual_tol:
            failures.append(f"solution {i} residual {sol.residual:.3e}")
        try:
            crit = plane_critical_points(sol.plane)
        except NumericError as exc:
            failures.append(f"solution {i} critical points failed: {exc}")
            crit_errors.append(math.inf)
            continue
        if len(crit) != len(target):
            failures.append(f"solution {i} has {len(crit)} critical points")
            crit_errors.append(math.inf)
            continue
        crit = sorted(crit, key=lambda z: (z.real, z.imag))
        err = max(abs(a - b) for a, b in zip(crit, target))
        crit_errors.append(err)
        if err > crit_tol:
            failures.append(f"solution {i} critical points off by {err:.3e}")

    return TheoremReport(
        d=problem.d,
        expected_count=expected,
        found_count=found,
        count_ok=count_ok,
        real_flags=real_flags,
        residuals=residuals,
        critical_point_errors=crit_errors,
        failures=failures,
    )


def random_problem(d: int, rng, low: float = -3.0, high: float = 3.0) -> ShapiroProblem:
    """A random strictly increasing configuration with comfortable separation."""
    m = 2 * d - 2
    min_gap = (high - low) / (20.0 * m)
    while True:
        pts = np.sort(rng.uniform(low, high, size=m))
        if np.min(np.diff(pts)) > min_gap:
            return ShapiroProblem(d, tuple(float(x) for x in pts))
