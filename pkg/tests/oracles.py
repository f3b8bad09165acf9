"""Independent solution oracles used by the test suite.

These deliberately avoid the homotopy tracker: a dense batch of random-start
Newton iterations on the same square system, clustered by Pluecker distance.
"""

import math

import numpy as np

from wronski.numcore import Plane2, plucker_distance
from wronski.solver import ShapiroProblem, build_system


def hand_d3_planes():
    """Exact degree-3 planes for critical points (-3, -1, 1, 3).

    From the odd/even ansatz p = z^3 + a z, q = z^2 + b: a - 3b = 10, ab = 9.
    """
    out = []
    for sign in (1, -1):
        root = math.sqrt(52.0)
        a = 5.0 + sign * root
        b = (-5.0 + sign * root) / 3.0
        out.append(Plane2.from_polys([0, a, 0, 1], [b, 0, 1], d=3))
    return out


def newton_grid_oracle(problem: ShapiroProblem, n_starts=10_000, seed=1, radius=3.0):
    """All solution planes found by batched Newton from random starts."""
    system = build_system(problem)
    m = system.n_unknowns
    rng = np.random.default_rng(seed)
    u = radius * (rng.normal(size=(n_starts, m)) + 1j * rng.normal(size=(n_starts, m)))

    powers, dpowers = system.powers, system.dpowers

    def batch_parts(u):
        k = system.d - 1
        a, b = u[:, :k], u[:, k:]
        p = system.p_lead[None, :] + a @ powers.T
        dp = system.dp_lead[None, :] + a @ dpowers.T
        q = system.q_lead[None, :] + b @ powers.T
        dq = system.dq_lead[None, :] + b @ dpowers.T
        return p, dp, q, dq

    for _ in range(60):
        p, dp, q, dq = batch_parts(u)
        f = p * dq - dp * q
        ja = powers[None, :, :] * dq[:, :, None] - dpowers[None, :, :] * q[:, :, None]
        jb = dpowers[None, :, :] * p[:, :, None] - powers[None, :, :] * dp[:, :, None]
        jac = np.concatenate([ja, jb], axis=2)
        good = np.abs(np.linalg.det(jac)) > 1e-300
        step = np.zeros_like(u)
        step[good] = np.linalg.solve(jac[good], -f[good][:, :, None])[:, :, 0]
        u = u + step
        u[~np.isfinite(u).all(axis=1)] = 0.0

    # keep converged, deduplicate coarsely on coordinates, then on planes
    kept = []
    for row in u:
        if not np.all(np.isfinite(row)):
            continue
        if system.residual_of(row) < 1e-11:
            kept.append(row)
    unique_rows = {}
    for row in kept:
        unique_rows.setdefault(tuple(np.round(row, 6)), row)

    planes = []
    for row in unique_rows.values():
        plane = system.plane_from(row)
        if all(plucker_distance(plane, other) > 1e-6 for other in planes):
            planes.append(plane)
    return planes


def same_plane_sets(planes_a, planes_b, tol=1e-6) -> bool:
    if len(planes_a) != len(planes_b):
        return False
    unmatched = list(planes_b)
    for p in planes_a:
        hit = None
        for i, q in enumerate(unmatched):
            if plucker_distance(p, q) < tol:
                hit = i
                break
        if hit is None:
            return False
        unmatched.pop(hit)
    return True
