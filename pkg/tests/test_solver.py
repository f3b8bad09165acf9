import numpy as np
import pytest

from oracles import hand_d3_planes, newton_grid_oracle, same_plane_sets
from wronski.numcore import Plane2, is_real_plane, plucker_distance
from wronski.solver import (
    ShapiroProblem,
    SolveConfig,
    SolveError,
    _random_increasing_mobius,
    build_system,
    random_problem,
    solve_shapiro,
    transport_plane,
    verify_theorems,
)

X4 = (-3.0, -1.0, 1.0, 3.0)


# ---------------------------------------------------------------------------
# problem validation
# ---------------------------------------------------------------------------

def test_problem_requires_increasing_points():
    with pytest.raises(SolveError):
        ShapiroProblem(3, (1.0, -1.0, 2.0, 3.0))


def test_problem_requires_separation():
    with pytest.raises(SolveError):
        ShapiroProblem(3, (0.0, 1e-9, 1.0, 2.0))


def test_problem_rejects_complex_unless_unchecked():
    with pytest.raises(SolveError):
        ShapiroProblem(3, (-3.0, -1.0 + 0.1j, 1.0, 3.0))
    ShapiroProblem.unchecked(3, (-3.0, -1.0 + 0.1j, 1.0, 3.0))


def test_problem_from_circle_points_roundtrip():
    from wronski.numcore import CAYLEY

    problem = ShapiroProblem(3, X4)
    circle = [CAYLEY(x) for x in X4]
    back, alpha = ShapiroProblem.from_circle_points(3, circle)
    assert back.d == 3
    assert len(back.points) == 4


# ---------------------------------------------------------------------------
# build_system
# ---------------------------------------------------------------------------

def test_system_shape_d3():
    system = build_system(ShapiroProblem(3, X4))
    assert system.n_unknowns == 4
    assert system.eval(np.zeros(4, dtype=complex)).shape == (4,)


def test_system_at_origin_is_minus_power():
    # W(z^d, z^(d-1)) = -z^(2d-2)
    for d, pts in [(3, X4), (4, (-3.0, -2.0, -1.0, 1.0, 2.0, 3.0))]:
        system = build_system(ShapiroProblem(d, pts))
        vals = system.eval(np.zeros(2 * d - 2, dtype=complex))
        expect = -np.asarray(pts, dtype=complex) ** (2 * d - 2)
        assert np.max(np.abs(vals - expect)) < 1e-9


def test_known_solution_has_tiny_residual():
    system = build_system(ShapiroProblem(3, X4))
    a = 5.0 + np.sqrt(52.0)
    b = (-5.0 + np.sqrt(52.0)) / 3.0
    u = np.array([0.0, a, b, 0.0], dtype=complex)  # a0, a1, b0, b1
    assert system.residual_of(u) < 1e-12


# ---------------------------------------------------------------------------
# solve_shapiro
# ---------------------------------------------------------------------------

def test_solve_d2_hand_plane():
    sols = solve_shapiro(ShapiroProblem(2, (-1.0, 1.0)), SolveConfig(seed=5))
    assert len(sols) == 1
    hand = Plane2.from_polys([1, -2, 1], [1, 2, 1])  # (z-1)^2, (z+1)^2
    assert plucker_distance(sols.planes()[0], hand) < 1e-8
    assert sols.solutions[0].is_real


def test_solve_d3_matches_hand_planes():
    sols = solve_shapiro(ShapiroProblem(3, X4), SolveConfig(seed=5))
    assert len(sols) == 2
    assert same_plane_sets(sols.planes(), hand_d3_planes(), tol=1e-7)
    assert all(s.is_real for s in sols.solutions)
    assert all(s.residual < 1e-10 for s in sols.solutions)


def test_solve_d3_matches_newton_oracle():
    rng = np.random.default_rng(101)
    for _ in range(3):
        problem = random_problem(3, rng)
        sols = solve_shapiro(problem, SolveConfig(seed=3))
        oracle = newton_grid_oracle(problem, n_starts=4000, seed=17)
        assert same_plane_sets(sols.planes(), oracle)


def test_solve_d4_random_has_five_real_planes():
    rng = np.random.default_rng(7)
    problem = random_problem(4, rng)
    sols = solve_shapiro(problem, SolveConfig(seed=11))
    assert len(sols) == 5
    assert all(s.is_real for s in sols.solutions)


def test_solve_deterministic_under_seed():
    problem = ShapiroProblem(3, X4)
    a = solve_shapiro(problem, SolveConfig(seed=42))
    b = solve_shapiro(problem, SolveConfig(seed=42))
    assert len(a) == len(b)
    for sa, sb in zip(a.solutions, b.solutions):
        assert np.array_equal(sa.plane.plucker(), sb.plane.plucker())


def test_discarded_paths_are_accounted():
    sols = solve_shapiro(ShapiroProblem(3, X4), SolveConfig(seed=1))
    d = sols.diagnostics
    assert d["paths_tracked"] >= 16
    kept = d["paths_tracked"] - d["paths_diverged"] - d["paths_failed_polish"]
    assert kept >= len(sols) + d["duplicates_merged"]


# ---------------------------------------------------------------------------
# verify_theorems
# ---------------------------------------------------------------------------

def test_verify_passes_on_good_instance():
    problem = ShapiroProblem(3, X4)
    report = verify_theorems(problem, solve_shapiro(problem, SolveConfig(seed=2)))
    assert report.passed
    assert report.found_count == 2


def test_verify_flags_complex_perturbed_input():
    problem = ShapiroProblem.unchecked(3, (-3.0, -1.0 + 1e-3j, 1.0, 3.0))
    sols = solve_shapiro(problem, SolveConfig(seed=2))
    report = verify_theorems(problem, sols)
    assert not report.passed
    assert any("real" in f for f in report.failures)


# ---------------------------------------------------------------------------
# Moebius equivariance
# ---------------------------------------------------------------------------

def test_mobius_equivariance_d3():
    rng = np.random.default_rng(23)
    problem = ShapiroProblem(3, X4)
    sols = solve_shapiro(problem, SolveConfig(seed=4))
    for _ in range(3):
        mob = _random_increasing_mobius(rng, problem.points)
        moved = sorted(mob(x).real for x in problem.points)
        shifted = ShapiroProblem(3, tuple(moved))
        shifted_sols = solve_shapiro(shifted, SolveConfig(seed=4))
        assert len(shifted_sols) == len(sols)
        assert [s.is_real for s in shifted_sols.solutions].count(True) == len(sols)
        transported = [transport_plane(p, mob) for p in shifted_sols.planes()]
        assert same_plane_sets(transported, sols.planes(), tol=1e-5)
