"""Complex polynomial arithmetic, Moebius transport and 2-plane geometry.

Polynomials are coefficient sequences ascending by degree.  Planes of
polynomials are identified by canonical Pluecker vectors (unit norm, phase
fixed by making the first largest-modulus entry positive real), which give
deterministic deduplication keys.  Moebius maps are kept as 2x2 matrices
and applied projectively so the point at infinity needs no special cases
upstream.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

COEFF_TOL = 1e-12
ROOT_CLUSTER_RADIUS = 1e-8
REALNESS_RATIO = 1e-8
INF = complex("inf")


class NumericError(Exception):
    pass


# ---------------------------------------------------------------------------
# polynomials (ascending coefficient arrays)
# ---------------------------------------------------------------------------

def as_poly(coeffs) -> np.ndarray:
    return np.atleast_1d(np.asarray(coeffs, dtype=complex))

def poly_trim(coeffs, rel_tol: float = COEFF_TOL) -> np.ndarray:
    c = as_poly(coeffs)
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        return np.zeros(1, dtype=complex)
    keep = np.nonzero(np.abs(c) > rel_tol * scale)[0]
    if keep.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: keep[-1] + 1]

def poly_degree(coeffs) -> int:
    c = poly_trim(coeffs)
    if c.size == 1 and c[0] == 0:
        return -1
    return c.size - 1

def poly_derivative(coeffs) -> np.ndarray:
    c = as_poly(coeffs)
    if c.size <= 1:
        return np.zeros(1, dtype=complex)
    return c[1:] * np.arange(1, c.size)

def poly_mul(a, b) -> np.ndarray:
    return np.convolve(as_poly(a), as_poly(b))

def poly_add(a, b) -> np.ndarray:
    a, b = as_poly(a), as_poly(b)
    if a.size < b.size:
        a = np.pad(a, (0, b.size - a.size))
    elif b.size < a.size:
        b = np.pad(b, (0, a.size - b.size))
    return a + b

def poly_eval(coeffs, z):
    c = as_poly(coeffs)
    result = np.zeros_like(np.asarray(z, dtype=complex))
    for coeff in c[::-1]:
        result = result * z + coeff
    return result


def wronskian(r, q) -> np.ndarray:
    """r * q' - r' * q, trimmed."""
    r, q = as_poly(r), as_poly(q)
    w = poly_add(poly_mul(r, poly_derivative(q)), -poly_mul(poly_derivative(r), q))
    return poly_trim(w)


def poly_roots(coeffs, cluster_radius: float = ROOT_CLUSTER_RADIUS) -> list[complex]:
    """All roots, by companion-matrix eigenvalues plus a Newton polish.

    Roots closer than the cluster radius are merged onto their mean, so a
    multiple root is reported as repeated identical values.
    """
    c = poly_trim(coeffs)
    if poly_degree(c) < 0:
        raise NumericError("zero polynomial has no root set")
    if poly_degree(c) == 0:
        return []
    scale = np.max(np.abs(c))
    raw = np.roots(c[::-1] / scale)

    dc = poly_derivative(c)
    ddc = poly_derivative(dc)
    polished = []
    for z in raw:
        best, best_val = complex(z), abs(complex(poly_eval(c, z)))
        for _ in range(12):
            fz = complex(poly_eval(c, best))
            dfz = complex(poly_eval(dc, best))
            ddfz = complex(poly_eval(ddc, best))
            # Newton on f/f', whose zeros are simple at any multiplicity
            denom = dfz * dfz - fz * ddfz
            if abs(denom) > 1e-300:
                step = fz * dfz / denom
            elif abs(dfz) > 1e-300:
                step = fz / dfz
            else:
                break
            cand = best - step
            val = abs(complex(poly_eval(c, cand)))
            if val <= best_val:
                best, best_val = cand, val
            else:
                break
            if abs(step) < 1e-16 * (1.0 + abs(best)):
                break
        polished.append(best)

    polished.sort(key=lambda z: (z.real, z.imag))
    clusters: list[list[complex]] = []
    for z in polished:
        placed = False
        for cluster in clusters:
            if any(abs(z - w) <= cluster_radius for w in cluster):
                cluster.append(z)
                placed = True
                break
        if not placed:
            clusters.append([z])
    clusters = _merge_certified_multiples(c, clusters)
    out = []
    for cluster in clusters:
        center = sum(cluster) / len(cluster)
        out.extend([center] * len(cluster))
    out.sort(key=lambda z: (z.real, z.imag))
    return out


_MULTIPLE_CANDIDATE_RADIUS = 1e-7  # below the 1e-6 separation floor of real inputs


def _merge_certified_multiples(coeffs, clusters):
    """Merge root clusters that certify as one multiple root.

    Eigenvalue and Newton accuracy for an m-fold root is only eps^(1/m), so
    genuine multiples can land just outside the cluster radius.  A pair of
    clusters closer than the candidate radius is merged when the root of the
    appropriate derivative reproduces a zero of every lower derivative.
    """
    merged = True
    while merged and len(clusters) > 1:
        merged = False
        clusters.sort(key=lambda cl: (cl[0].real, cl[0].imag))
        for i in range(len(clusters) - 1):
            a, b = clusters[i], clusters[i + 1]
            ca = sum(a) / len(a)
            cb = sum(b) / len(b)
            if abs(ca - cb) > _MULTIPLE_CANDIDATE_RADIUS:
                continue
            m = len(a) + len(b)
            z = _certify_multiple_root(coeffs, (ca + cb) / 2.0, m)
            if z is not None:
                clusters[i : i + 2] = [[z] * m]
                merged = True
                break
    return clusters


def _certify_multiple_root(coeffs, guess: complex, m: int):
    derivs = [as_poly(coeffs)]
    for _ in range(m):
        derivs.append(poly_derivative(derivs[-1]))
    if poly_degree(derivs[m - 1]) < 1:
        return None
    z = guess
    for _ in range(30):  # Newton on the (m-1)-th derivative, simple root there
        f = complex(poly_eval(derivs[m - 1], z))
        df = complex(poly_eval(derivs[m], z))
        if abs(df) < 1e-300:
            return None
        step = f / df
        z -= step
        if abs(step) < 1e-15 * (1.0 + abs(z)):
            break
    if abs(z - guess) > 4 * _MULTIPLE_CANDIDATE_RADIUS:
        return None
    for j in range(m):
        scale = float(np.linalg.norm(derivs[j])) * max(1.0, abs(z)) ** max(
            poly_degree(derivs[j]), 0
        )
        if abs(complex(poly_eval(derivs[j], z))) > 1e-9 * scale:
            return None
    return z


# ---------------------------------------------------------------------------
# Moebius transformations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Mobius:
    """2x2 complex matrix acting projectively, stored up to a fixed phase."""

    m: tuple[tuple[complex, complex], tuple[complex, complex]]

    @classmethod
    def from_matrix(cls, matrix) -> "Mobius":
        a = np.asarray(matrix, dtype=complex)
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        norm = np.linalg.norm(a)
        if norm == 0.0 or abs(det) / norm**2 < COEFF_TOL:
            raise NumericError("singular matrix is not a Moebius map")
        a = a / norm
        flat = a.ravel()
        pivot = flat[int(np.argmax(np.abs(flat)))]
        a = a * (abs(pivot) / pivot)
        return cls(((complex(a[0, 0]), complex(a[0, 1])), (complex(a[1, 0]), complex(a[1, 1]))))

    @classmethod
    def identity(cls) -> "Mobius":
        return cls.from_matrix([[1, 0], [0, 1]])

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.m, dtype=complex)

    def inverse(self) -> "Mobius":
        (a, b), (c, d) = self.m
        return Mobius.from_matrix([[d, -b], [-c, a]])

    def compose(self, other: "Mobius") -> "Mobius":
        """self after other: (self.compose(other))(z) = self(other(z))."""
        return Mobius.from_matrix(self.matrix @ other.matrix)

    def __call__(self, z: complex) -> complex:
        (a, b), (c, d) = self.m
        z = complex(z)
        if _is_inf(z):
            num, den = a, c
        else:
            num, den = a * z + b, c * z + d
        if abs(den) <= 1e-300 * max(1.0, abs(num)):
            return INF
        return num / den


def mobius_from_three_points(source, target) -> Mobius:
    """The unique Moebius map sending one distinct triple to another.

    Either triple may contain the point at infinity.
    """
    def to_01inf(a, b, c) -> Mobius:
        pts = [a, b, c]
        for z in pts:
            others = [w for w in pts if w is not z]
            if not _is_inf(z) and any(abs(z - w) < 1e-14 for w in others if not _is_inf(w)):
                raise NumericError("coincident points in Moebius construction")
        if sum(_is_inf(z) for z in pts) > 1:
            raise NumericError("triple contains infinity twice")
        if _is_inf(a):
            return Mobius.from_matrix([[0, b - c], [1, -c]])
        if _is_inf(b):
            return Mobius.from_matrix([[1, -a], [1, -c]])
        if _is_inf(c):
            return Mobius.from_matrix([[1, -a], [0, b - a]])
        return Mobius.from_matrix(
            [[b - c, -a * (b - c)], [b - a, -c * (b - a)]]
        )

    return to_01inf(*target).inverse().compose(to_01inf(*source))


def _is_inf(z) -> bool:
    z = complex(z)
    return cmath.isinf(z.real) or cmath.isinf(z.imag)


def mobius_substitute(coeffs, mob: Mobius, degree: int) -> np.ndarray:
    """Coefficients of (c z + d)^degree * P((a z + b) / (c z + d)).

    The substitution is the linear action of a Moebius map on polynomials of
    degree at most ``degree``; it transports planes by acting on each basis
    row.
    """
    p = as_poly(coeffs)
    if p.size - 1 > degree:
        raise NumericError("polynomial degree exceeds the transport degree")
    (a, b), (c, d) = mob.m
    num = np.array([b, a], dtype=complex)  # a z + b, ascending
    den = np.array([d, c], dtype=complex)
    out = np.zeros(degree + 1, dtype=complex)
    num_pow = np.ones(1, dtype=complex)
    den_pows = [np.ones(1, dtype=complex)]
    for _ in range(degree):
        den_pows.append(poly_mul(den_pows[-1], den))
    for k in range(p.size):
        if p[k] != 0:
            term = poly_mul(num_pow, den_pows[degree - k]) * p[k]
            out[: term.size] += term
        if k + 1 < p.size:
            num_pow = poly_mul(num_pow, num)
    return out


# ---------------------------------------------------------------------------
# rational maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalMap:
    """Quotient of two polynomials, evaluated projectively."""

    num: tuple[complex, ...]
    den: tuple[complex, ...]

    @classmethod
    def from_polys(cls, num, den) -> "RationalMap":
        n, d = poly_trim(num), poly_trim(den)
        if poly_degree(n) < 0 and poly_degree(d) < 0:
            raise NumericError("0/0 is not a rational map")
        return cls(tuple(n), tuple(d))

    @property
    def degree(self) -> int:
        return max(poly_degree(self.num), poly_degree(self.den))

    def __call__(self, z: complex) -> complex:
        if _is_inf(z):
            dn = poly_degree(self.num)
            dd = poly_degree(self.den)
            if dn > dd:
                return INF
            if dn < dd:
                return 0j
            return self.num[-1] / self.den[-1]
        n = complex(poly_eval(self.num, z))
        d = complex(poly_eval(self.den, z))
        if abs(d) <= 1e-300 * max(1.0, abs(n)):
            return INF
        return n / d

    def derivative_value(self, z: complex) -> complex:
        n = complex(poly_eval(self.num, z))
        d = complex(poly_eval(self.den, z))
        dn = complex(poly_eval(poly_derivative(self.num), z))
        dd = complex(poly_eval(poly_derivative(self.den), z))
        if abs(d) <= 1e-300:
            return INF
        return (dn * d - n * dd) / (d * d)

    def wronski(self) -> np.ndarray:
        return wronskian(self.num, self.den)

    def critical_points(self) -> list[complex]:
        return poly_roots(self.wronski())

    def postcompose(self, mob: Mobius) -> "RationalMap":
        (a, b), (c, d) = mob.m
        num = poly_add(as_poly(self.num) * a, as_poly(self.den) * b)
        den = poly_add(as_poly(self.num) * c, as_poly(self.den) * d)
        return RationalMap.from_polys(num, den)

    def precompose(self, mob: Mobius) -> "RationalMap":
        deg = max(poly_degree(self.num), poly_degree(self.den))
        num = mobius_substitute(self.num, mob, deg)
        den = mobius_substitute(self.den, mob, deg)
        return RationalMap.from_polys(num, den)


CAYLEY = Mobius.from_matrix([[1, -1j], [1, 1j]])  # z -> (z - i) / (z + i)


def cayley_transport(f: RationalMap) -> RationalMap:
    """Conjugate a real-line model map into the circle model.

    Returns C o f o C^{-1} for the Cayley map C; a real rational map with
    real critical points becomes a circle-preserving map with critical
    points on the unit circle (at the Cayley images of the original ones).
    """
    before = f.degree
    out = f.precompose(CAYLEY.inverse()).postcompose(CAYLEY)
    if out.degree != before:
        raise NumericError("degree changed under Cayley transport")
    return out


# ---------------------------------------------------------------------------
# 2-planes of polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Plane2:
    """A 2-dimensional space of polynomials of degree at most d."""

    d: int
    basis: tuple[tuple[complex, ...], ...]  # 2 x (d+1), orthonormal rows

    @classmethod
    def from_rows(cls, rows, d: int | None = None) -> "Plane2":
        a = np.asarray(rows, dtype=complex)
        if a.ndim != 2 or a.shape[0] != 2:
            raise NumericError("a plane needs exactly two basis rows")
        if d is None:
            d = a.shape[1] - 1
        if a.shape[1] > d + 1:
            raise NumericError("basis rows longer than degree bound allows")
        if a.shape[1] < d + 1:
            a = np.pad(a, ((0, 0), (0, d + 1 - a.shape[1])))
        _, s, vh = np.linalg.svd(a)
        if s[1] < COEFF_TOL * s[0]:
            raise NumericError("rows are proportional, not a plane")
        basis = vh[:2]
        return cls(d, tuple(tuple(complex(x) for x in row) for row in basis))

    @classmethod
    def from_polys(cls, r, q, d: int | None = None) -> "Plane2":
        r, q = as_poly(r), as_poly(q)
        if d is None:
            d = max(r.size, q.size) - 1
        rows = np.zeros((2, d + 1), dtype=complex)
        rows[0, : r.size] = r
        rows[1, : q.size] = q
        return cls.from_rows(rows, d)

    @property
    def basis_array(self) -> np.ndarray:
        return np.array(self.basis, dtype=complex)

    def plucker(self) -> np.ndarray:
        """Canonical unit Pluecker vector with fixed phase."""
        b = self.basis_array
        n = b.shape[1]
        idx = [(i, j) for i in range(n) for j in range(i + 1, n)]
        p = np.array([b[0, i] * b[1, j] - b[0, j] * b[1, i] for i, j in idx])
        p = p / np.linalg.norm(p)
        pivot = p[int(np.argmax(np.abs(p)))]
        return p * (abs(pivot) / pivot)

    def wronski(self) -> np.ndarray:
        b = self.basis_array
        return wronskian(b[0], b[1])


def plucker_distance(p1: Plane2, p2: Plane2) -> float:
    """Phase-invariant distance between canonical Pluecker vectors.

    Computed as the norm of the phase-aligned difference, which stays
    accurate down to machine precision for nearly equal planes.
    """
    a, b = p1.plucker(), p2.plucker()
    overlap = np.vdot(b, a)
    if abs(overlap) > 0:
        b = b * (overlap / abs(overlap))
    return float(np.linalg.norm(a - b))


def critical_points(plane: Plane2) -> list[complex]:
    """Finite critical points of the plane, roots of its Wronskian.

    A multiple Wronskian root where both basis polynomials vanish marks a
    plane whose members share a factor; that is rejected.
    """
    w = plane.wronski()
    roots = poly_roots(w)
    b = plane.basis_array
    seen = {}
    for z in roots:
        seen[z] = seen.get(z, 0) + 1
    for z, mult in seen.items():
        if mult >= 2:
            v0 = abs(complex(poly_eval(b[0], z)))
            v1 = abs(complex(poly_eval(b[1], z)))
            scale = max(1.0, float(np.max(np.abs(b))))
            if v0 < 1e-8 * scale and v1 < 1e-8 * scale:
                raise NumericError(
                    f"basis polynomials share the root {z}; the plane is degenerate"
                )
    return roots


def has_simple_critical_points(plane: Plane2) -> bool:
    w = plane.wronski()
    if poly_degree(w) != 2 * plane.d - 2:
        return False
    roots = critical_points(plane)
    return len(set(roots)) == len(roots)


def is_real_plane(plane: Plane2, ratio_tol: float = REALNESS_RATIO) -> bool:
    """True when the plane admits a basis of real polynomials."""
    b = plane.basis_array
    stack = np.vstack([b, b.conj()])
    s = np.linalg.svd(stack, compute_uv=False)
    if len(s) < 3:  # the plane is the whole degree-1 space
        return True
    return bool(s[2] < ratio_tol * s[0])


def real_basis(plane: Plane2) -> tuple[np.ndarray, np.ndarray]:
    """A real spanning pair of a real plane.

    The real and imaginary parts of any basis lie in the real locus of the
    plane; the two dominant directions among them span it.
    """
    if not is_real_plane(plane):
        raise NumericError("plane has no real basis")
    b = plane.basis_array
    candidates = np.vstack([b.real, b.imag])
    _, s, vh = np.linalg.svd(candidates)
    if s[1] < 1e-10 * s[0]:
        raise NumericError("could not extract two independent real directions")
    r0, r1 = vh[0], vh[1]
    rebuilt = Plane2.from_rows(np.vstack([r0, r1]).astype(complex), plane.d)
    if plucker_distance(rebuilt, plane) > 1e-8:
        raise NumericError("real basis does not span the original plane")
    return r0, r1


# ---------------------------------------------------------------------------
# circle-model normalization
# ---------------------------------------------------------------------------

CUBE_ROOTS = (1.0 + 0.0j, cmath.exp(2j * math.pi / 3), cmath.exp(-2j * math.pi / 3))


@dataclass(frozen=True)
class NormalizedMap:
    """A circle map pinned at the cube roots of unity, with its transports."""

    func: RationalMap
    anchor_map: Mobius  # sends the chosen critical anchors to the cube roots
    value_map: Mobius  # postcomposition fixing the values at the cube roots
    critical_points: tuple[complex, ...]  # transported, anticlockwise, last is 1


def normalize_to_rstar(
    f: RationalMap, crit_points, anchors: tuple[int, int, int]
) -> NormalizedMap:
    """Renormalize a circle-model map so the three anchors sit at cube roots.

    ``anchors`` are indices into ``crit_points`` playing the roles of the
    base vertex, its successor and the split vertex.  The returned map fixes
    the cube roots of unity, has vanishing derivative there, and still
    preserves the unit circle.
    """
    pts = [complex(z) for z in crit_points]
    for z in pts:
        if abs(abs(z) - 1.0) > 1e-6:
            raise NumericError(f"critical point {z} is not on the unit circle")
    i0, i1, iN = anchors
    source = (pts[i0], pts[i1], pts[iN])
    m = mobius_from_three_points(source, CUBE_ROOTS)
    f_shift = f.precompose(m.inverse())
    values = tuple(f_shift(v) for v in CUBE_ROOTS)
    ell = mobius_from_three_points(values, CUBE_ROOTS)
    g = f_shift.postcompose(ell)
    transported = tuple(m(z) for z in pts)
    return NormalizedMap(g, m, ell, transported)


def rstar_residuals(g: RationalMap) -> tuple[float, float]:
    """Max deviation of fixed points and of derivatives at the cube roots."""
    fix = max(abs(g(v) - v) for v in CUBE_ROOTS)
    der = max(abs(g.derivative_value(v)) for v in CUBE_ROOTS)
    return fix, der
