import cmath
import math

import numpy as np
import pytest

from wronski.numcore import (
    CAYLEY,
    CUBE_ROOTS,
    Mobius,
    NumericError,
    Plane2,
    RationalMap,
    cayley_transport,
    critical_points,
    has_simple_critical_points,
    is_real_plane,
    mobius_from_three_points,
    mobius_substitute,
    normalize_to_rstar,
    plucker_distance,
    poly_roots,
    real_basis,
    rstar_residuals,
    wronskian,
)

INF = complex("inf")


# ---------------------------------------------------------------------------
# wronskian
# ---------------------------------------------------------------------------

def test_wronskian_counterexample_pair_exact():
    # W(z - i, z^3 + 3i z^2) = 2 z^3 + 6 z, with exact small-integer arithmetic
    r = [-1j, 1]
    q = [0, 0, 3j, 1]
    w = wronskian(r, q)
    assert w.tolist() == [0j, 6 + 0j, 0j, 2 + 0j]


def test_wronskian_trivial_pairs():
    assert wronskian([1], [0, 1]).tolist() == [(1 + 0j)]
    assert wronskian([1, 2, 3], [1, 2, 3]).tolist() == [0j]


def test_wronskian_bilinear_antisymmetric():
    rng = np.random.default_rng(7)
    for _ in range(20):
        r = rng.normal(size=5) + 1j * rng.normal(size=5)
        q = rng.normal(size=5) + 1j * rng.normal(size=5)
        s = rng.normal(size=5) + 1j * rng.normal(size=5)
        alpha, beta = complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal())
        lhs = wronskian(alpha * r + beta * q, q)
        rhs = alpha * wronskian(r, q)
        scale = max(np.max(np.abs(lhs)), np.max(np.abs(rhs)), 1.0)
        assert np.max(np.abs(np.subtract(*_pad(lhs, rhs)))) < 1e-10 * scale
        anti = np.subtract(*_pad(wronskian(r, s), -wronskian(s, r)))
        assert np.max(np.abs(anti)) < 1e-10 * max(1.0, np.max(np.abs(wronskian(r, s))))


def _pad(a, b):
    n = max(len(a), len(b))
    return np.pad(a, (0, n - len(a))), np.pad(b, (0, n - len(b)))


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------

def test_roots_quadratic():
    roots = poly_roots([1, 0, 1])  # z^2 + 1
    assert sorted(z.imag for z in roots) == pytest.approx([-1.0, 1.0], abs=1e-12)


def test_roots_of_the_counterexample_wronskian():
    roots = sorted(poly_roots([0, 6, 0, 2]), key=lambda z: z.imag)
    expect = [-1j * math.sqrt(3), 0, 1j * math.sqrt(3)]
    for z, w in zip(roots, expect):
        assert abs(z - w) < 1e-10


def test_roots_double_root_clusters():
    roots = poly_roots([1, -2, 1])  # (z - 1)^2
    assert len(roots) == 2
    assert roots[0] == roots[1]
    assert abs(roots[0] - 1.0) < 1e-6


def test_roots_zero_poly_rejected():
    with pytest.raises(NumericError):
        poly_roots([0.0])


def test_roots_reconstruction_random():
    rng = np.random.default_rng(11)
    for _ in range(10):
        true = rng.normal(size=6) + 1j * rng.normal(size=6)
        coeffs = np.array([1.0 + 0j])
        for z in true:
            coeffs = np.convolve(coeffs, [-z, 1.0])
        got = poly_roots(coeffs[::1])
        got_sorted = sorted(got, key=lambda z: (z.real, z.imag))
        true_sorted = sorted(true, key=lambda z: (z.real, z.imag))
        for a, b in zip(got_sorted, true_sorted):
            assert abs(a - b) < 1e-8


# ---------------------------------------------------------------------------
# planes, realness, pluecker
# ---------------------------------------------------------------------------

def test_critical_points_d2_hand_plane():
    plane = Plane2.from_polys([1, -2, 1], [1, 2, 1])  # (z-1)^2, (z+1)^2
    pts = sorted(critical_points(plane), key=lambda z: z.real)
    assert abs(pts[0] + 1) < 1e-10 and abs(pts[1] - 1) < 1e-10
    assert has_simple_critical_points(plane)


def test_critical_points_monomial_plane_not_simple():
    d = 4
    plane = Plane2.from_polys([1], [0, 0, 0, 0, 1], d=d)  # span{1, z^4}
    pts = critical_points(plane)
    assert len(pts) == d - 1
    assert all(abs(z) < 1e-8 for z in pts)
    assert not has_simple_critical_points(plane)


def test_degenerate_common_factor_plane_rejected():
    # span{(z-1) z, (z-1) (z+2)} shares the root 1
    plane = Plane2.from_polys([0, -1, 1], [-2, 1, 1], d=3)
    with pytest.raises(NumericError):
        critical_points(plane)


def test_is_real_plane_examples():
    assert not is_real_plane(Plane2.from_polys([-1j, 1], [0, 0, 3j, 1]))
    assert is_real_plane(Plane2.from_polys([1], [0, 1]))
    assert is_real_plane(Plane2.from_polys([1j, 1j], [0, 0, 1]))


def test_real_basis_spans_same_plane():
    plane = Plane2.from_polys([1j, 1j], [0, 0, 1])
    r0, r1 = real_basis(plane)
    assert np.max(np.abs(np.imag(r0))) == 0
    rebuilt = Plane2.from_rows(np.vstack([r0, r1]).astype(complex), plane.d)
    assert plucker_distance(rebuilt, plane) < 1e-8


def test_real_basis_rejects_non_real_plane():
    with pytest.raises(NumericError):
        real_basis(Plane2.from_polys([-1j, 1], [0, 0, 3j, 1]))


def test_plucker_basis_invariance():
    rng = np.random.default_rng(3)
    rows = rng.normal(size=(2, 5)) + 1j * rng.normal(size=(2, 5))
    plane1 = Plane2.from_rows(rows)
    mix = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    plane2 = Plane2.from_rows(mix @ rows)
    assert plucker_distance(plane1, plane2) < 1e-10
    # canonicalization is idempotent
    p = plane1.plucker()
    again = Plane2.from_rows(plane1.basis_array).plucker()
    assert np.max(np.abs(p - again)) < 1e-12


def test_plane_wronskians_proportional_across_bases():
    rng = np.random.default_rng(5)
    rows = rng.normal(size=(2, 5)) + 1j * rng.normal(size=(2, 5))
    mix = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    w1 = Plane2.from_rows(rows).wronski()
    w2 = wronskian((mix @ rows)[0], (mix @ rows)[1])
    ratio = w2[np.argmax(np.abs(w1))] / w1[np.argmax(np.abs(w1))]
    assert np.max(np.abs(w2 - ratio * w1)) < 1e-9 * np.max(np.abs(w2))


# ---------------------------------------------------------------------------
# Moebius
# ---------------------------------------------------------------------------

def test_mobius_identity_triples():
    m = mobius_from_three_points((0, 1, 2), (0, 1, 2))
    for z in (0.5, 1j, -3):
        assert abs(m(z) - z) < 1e-12
    m_inf = mobius_from_three_points((0, 1, INF), (0, 1, INF))
    assert abs(m_inf(5) - 5) < 1e-12


def test_mobius_three_point_mapping_exact():
    src = (0.3 + 0.1j, -1.0 + 0j, 2j)
    dst = (1.0 + 0j, -2.0 + 0j, 0.5j)
    m = mobius_from_three_points(src, dst)
    for a, b in zip(src, dst):
        assert abs(m(a) - b) < 1e-12


def test_mobius_circle_triple_preserves_circle():
    src = tuple(cmath.exp(1j * t) for t in (0.3, 1.7, 3.9))
    m = mobius_from_three_points(src, CUBE_ROOTS)
    z = cmath.exp(2.6j)
    assert abs(abs(m(z)) - 1.0) < 1e-10


def test_mobius_coincident_points_rejected():
    with pytest.raises(NumericError):
        mobius_from_three_points((1, 1, 2), (0, 1, 2))


def test_mobius_compose_and_inverse():
    m1 = Mobius.from_matrix([[2, 1], [1, 1]])
    m2 = Mobius.from_matrix([[1, -1j], [0.5, 1]])
    z = 0.7 - 0.2j
    assert abs(m1.compose(m2)(z) - m1(m2(z))) < 1e-12
    assert abs(m1.inverse()(m1(z)) - z) < 1e-12


def test_mobius_substitute_matches_pointwise():
    m = Mobius.from_matrix([[1, 2], [1, 3]])
    (_, _), (c, d) = m.m  # stored entries carry the normalization scale
    p = [1, 0, -2, 1]  # z^3 - 2 z^2 + 1
    out = mobius_substitute(p, m, 3)
    for z in (0.3, -1.5, 2j):
        lhs = complex(np.polyval(out[::-1], z))
        w = m(z)
        rhs = complex(np.polyval(np.array(p[::-1], dtype=complex), w)) * (c * z + d) ** 3
        assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(rhs))


# ---------------------------------------------------------------------------
# Cayley transport and normalization
# ---------------------------------------------------------------------------

def test_cayley_transport_identity():
    f = RationalMap.from_polys([0, 1], [1])
    F = cayley_transport(f)
    for z in (0.2 + 0.1j, 1j * 0.7, -0.3):
        assert abs(F(z) - z) < 1e-12


def test_cayley_moves_real_critical_points_to_circle():
    # f = ((z-1)^2) / ((z+1)^2) has critical points -1, 1
    f = RationalMap.from_polys([1, -2, 1], [1, 2, 1])
    F = cayley_transport(f)
    for x in (-1.0, 1.0):
        assert abs(abs(CAYLEY(x)) - 1.0) < 1e-12
    crit = F.critical_points()
    for z in crit:
        assert abs(abs(z) - 1.0) < 1e-8


def test_cayley_preserves_circle_symmetry():
    f = RationalMap.from_polys([1, -2, 1], [1, 2, 1])
    F = cayley_transport(f)
    rng = np.random.default_rng(2)
    for _ in range(5):
        z = complex(rng.normal(), rng.normal())
        if abs(z) < 1e-3:
            continue
        lhs = F(1.0 / z.conjugate())
        rhs = 1.0 / F(z).conjugate()
        assert abs(lhs - rhs) < 1e-8 * max(1.0, abs(rhs))


def hand_d3_maps():
    """The two exact degree-3 real maps with critical points (-3, -1, 1, 3).

    With p = z^3 + a z and q = z^2 + b the Wronskian is
    -(z^4 - (a - 3b) z^2 + a b), so a - 3b = 10 and a b = 9.
    """
    out = []
    for sign in (1, -1):
        root = math.sqrt(52.0)
        a = 5.0 + sign * root
        b = (-5.0 + sign * root) / 3.0
        out.append(RationalMap.from_polys([0, a, 0, 1], [b, 0, 1]))
    return out


def test_hand_d3_maps_have_prescribed_critical_points():
    for f in hand_d3_maps():
        crit = sorted(z.real for z in f.critical_points())
        assert crit == pytest.approx([-3.0, -1.0, 1.0, 3.0], abs=1e-9)


def _circle_model_d3():
    f = hand_d3_maps()[0]
    F = cayley_transport(f)
    crit = [CAYLEY(x) for x in (-3.0, -1.0, 1.0, 3.0)]
    return F, crit


def test_normalize_satisfies_fixed_point_conditions():
    F, crit = _circle_model_d3()
    norm = normalize_to_rstar(F, crit, (3, 0, 1))
    fix, der = rstar_residuals(norm.func)
    assert fix < 1e-8
    assert der < 1e-6
    assert abs(norm.critical_points[3] - 1.0) < 1e-12
    assert abs(norm.critical_points[0] - CUBE_ROOTS[1]) < 1e-12


def test_normalize_already_normalized_is_stable():
    F, crit = _circle_model_d3()
    norm = normalize_to_rstar(F, crit, (3, 0, 1))
    again = normalize_to_rstar(norm.func, list(norm.critical_points), (3, 0, 1))
    for z in (0.3 + 0.2j, 0.5j, -0.1 - 0.4j):
        assert abs(again.func(z) - norm.func(z)) < 1e-10


def test_normalize_kills_postcomposition():
    F, crit = _circle_model_d3()
    norm1 = normalize_to_rstar(F, crit, (3, 0, 1))
    ell = mobius_from_three_points(
        CUBE_ROOTS, tuple(cmath.exp(1j * t) for t in (0.2, 2.3, 4.4))
    )
    norm2 = normalize_to_rstar(F.postcompose(ell), crit, (3, 0, 1))
    for z in (0.3 + 0.2j, 0.5j, -0.1 - 0.4j):
        assert abs(norm1.func(z) - norm2.func(z)) < 1e-8
