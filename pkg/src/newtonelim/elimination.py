"""Elimination theory on Newton polytopes.

The composite polynomial of ``f_0..f_k`` is the defining equation of the
image of ``{f_0 = ... = f_k = 0}`` under a torus projection.  This module
computes its Newton polytope (as a rescaled mixed fiber polytope), the
face structure of that polytope, ratios of its vertex coefficients, and
the root-product/root-sum formulas for developed polytopes that make
those ratios explicit.  It also computes the multiplicity with which the
composite polynomial is a power of a square-free one.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product
from math import factorial, gcd
from typing import Sequence

from . import _linalg as la
from .errors import (
    DegenerateConfiguration,
    NotDeveloped,
    NotGeneric,
    PreconditionError,
)
from .fiber import (
    ProjectionContext,
    composite_body_l,
    contributing_faces,
    mf_vertex,
    span_of_composite,
)
from .laurent import (
    ONE,
    ZERO,
    GaussianRational,
    LaurentPoly,
    newton_polytope,
    substitute_binomials,
    truncation,
)
from .lattice_geom import (
    LatticeMap,
    Polytope,
    Subspace,
    Vec,
    convex_hull,
    face_normal,
    lattice_points,
    minkowski_sum_all,
    pairing,
    point,
    support_face,
    vec_add,
    vec_scale,
    vec_sub,
)
from .mixed_volume import mixed_volume

_SEED = 0x5EED


# ---------------------------------------------------------------------------
# composite Newton polytopes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Chart:
    """Coordinates of L given by the character embedding ``pi_x``."""

    ctx: ProjectionContext
    pi_x: LatticeMap
    to_pi: tuple[tuple[Fraction, ...], ...]   # L-coordinates -> Z^{n-k} coordinates
    index: int                                # [L ∩ Z^n : pi_x Z^{n-k}]

    @classmethod
    def of(cls, pi_x: LatticeMap) -> "_Chart":
        ctx = ProjectionContext.from_lattice_map(pi_x)
        m = [list(ctx.lcoords(col)) for col in pi_x.columns()]   # columns as rows
        mat = la.transpose(m)                                     # l x l, column j = lcoords(pi col j)
        inv = la.inverse(mat)
        index = abs(la.int_det([[int(x) for x in row] for row in mat]))
        return cls(ctx, pi_x, tuple(tuple(r) for r in inv), index)

    def point_to_pi(self, y: Sequence) -> Vec:
        return tuple(self.index * x for x in la.matvec(self.to_pi, list(y)))

    def covector_to_l(self, gamma: Sequence) -> tuple[Fraction, ...]:
        """``gamma`` on Z^{n-k} as a covector on L-coordinates (integer-scaled)."""
        row = [sum(Fraction(gamma[i]) * self.to_pi[i][j] for i in range(len(gamma)))
               for j in range(len(self.to_pi))]
        return tuple(Fraction(x) for x in row)


def canonical_shift(poly: Polytope) -> Polytope:
    """Translate so that every coordinate's minimum is zero."""
    low = [min(v[i] for v in poly.vertices) for i in range(poly.ambient_dim)]
    return poly.translate([-x for x in low])


def _check_embedding(pi_x: LatticeMap, As: Sequence[Polytope]):
    if pi_x.rank() != pi_x.source_dim:
        raise PreconditionError("the character embedding must be injective")
    k = pi_x.target_dim - pi_x.source_dim
    if len(As) != k + 1:
        raise PreconditionError(f"need k+1 = {k + 1} polytopes for this projection")


def composite_newton_polytope(As: Sequence[Polytope], pi_x: LatticeMap, shift: bool = True) -> Polytope:
    """Newton polytope of the composite polynomial, in Z^{n-k} coordinates."""
    _check_embedding(pi_x, As)
    chart = _Chart.of(pi_x)
    body = composite_body_l(As, chart.ctx)
    poly = convex_hull(chart.point_to_pi(v) for v in body.vertices)
    return canonical_shift(poly) if shift else poly


def verify_star_identity(As: Sequence[Polytope], pi_x: LatticeMap,
                         Bs: Sequence[Polytope]) -> tuple[Fraction, Fraction]:
    """Both sides of the mixed-volume identity characterizing composite bodies."""
    _check_embedding(pi_x, As)
    m = pi_x.source_dim
    if len(Bs) != m - 1:
        raise PreconditionError(f"need {m - 1} test polytopes in Z^{m}")
    n = pi_x.target_dim
    a = composite_newton_polytope(As, pi_x)
    lhs = factorial(m) * mixed_volume([a] + list(Bs))
    lifted = [convex_hull(pi_x(v) for v in b.vertices) for b in Bs]
    rhs = factorial(n) * mixed_volume(list(As) + lifted)
    return lhs, rhs


def standard_projection(n: int, k: int) -> LatticeMap:
    """Character embedding of the projection onto the last ``n - k`` coordinates."""
    return LatticeMap.of([[int(i == k + j) for j in range(n - k)] for i in range(n)])


# ---------------------------------------------------------------------------
# truncations of composite polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncationFactor:
    delta: tuple[Fraction, ...]
    faces: tuple[LaurentPoly, ...]


def truncation_decomposition(fs: Sequence[LaurentPoly], pi_x: LatticeMap,
                             gamma: Sequence) -> list[TruncationFactor]:
    """Covectors ``delta`` extending ``gamma`` whose face systems have a
    non-monomial composite polynomial."""
    As = [newton_polytope(f) for f in fs]
    _check_embedding(pi_x, As)
    if not any(gamma):
        return [TruncationFactor(tuple(Fraction(0) for _ in range(pi_x.target_dim)), tuple(fs))]
    chart = _Chart.of(pi_x)
    gl = chart.covector_to_l(gamma)
    out = []
    for delta, faces in contributing_faces(As, chart.ctx, gl):
        if span_of_composite(faces, chart.ctx).is_point:
            continue
        out.append(TruncationFactor(tuple(delta), tuple(truncation(f, delta) for f in fs)))
    return out


def factor_newton_sum(factors: Sequence[TruncationFactor], pi_x: LatticeMap) -> Polytope:
    """Minkowski sum of the composite polytopes of the truncated systems."""
    parts = [composite_newton_polytope([newton_polytope(f) for f in fac.faces], pi_x) for fac in factors]
    return canonical_shift(minkowski_sum_all(parts, pi_x.source_dim))


def face_of(poly: Polytope, gamma: Sequence) -> Polytope:
    return support_face(poly, gamma)[1]


# ---------------------------------------------------------------------------
# 2-determinant
# ---------------------------------------------------------------------------

def _multisets(n: int, size: int) -> list[tuple[int, ...]]:
    from itertools import combinations_with_replacement
    return list(combinations_with_replacement(range(n), size))


def _monomial_vector(mat: Sequence[Sequence[int]], n: int, index: dict) -> list[int]:
    """Coefficient vector (over Z_2, per multiset) of a matrix in the
    symmetric multilinear expansion."""
    vec = [0] * len(index)
    cols = len(mat[0])
    for choice in product(range(n), repeat=cols):
        val = 1
        for c, r in enumerate(choice):
            if not mat[r][c]:
                val = 0
                break
        if val:
            key = index[tuple(sorted(choice))]
            vec[key] ^= 1
    return vec


def _rank_gf2(rows: list[int]) -> tuple[int, list[int]]:
    """Rank of bitmask rows and the reduced basis."""
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
            basis.sort(reverse=True)
    return len(basis), basis


def _gf2_rank(mat: Sequence[Sequence[int]]) -> int:
    return _rank_gf2([int("".join(str(x % 2) for x in row), 2) for row in mat])[0]


def _nullspace_gf2(rows: list[list[int]], width: int) -> list[list[int]]:
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(width):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                m[i] = [a ^ b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(width) if c not in pivots]
    out = []
    for f in free:
        v = [0] * width
        v[f] = 1
        for row, p in zip(m, pivots):
            v[p] = row[f]
        out.append(v)
    return out


@lru_cache(maxsize=None)
def det2_table(n: int, seed: int = _SEED) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]:
    """Multisets of row indices and the values of the unique nonzero
    symmetric multilinear Z_2 function on n x (n+1) matrices vanishing on
    rank-deficient ones."""
    if n < 1 or n > 5:
        raise PreconditionError("det2 tables are available for 1 <= n <= 5")
    keys = _multisets(n, n + 1)
    index = {k: i for i, k in enumerate(keys)}
    width = len(keys)
    constraints: list[list[int]] = []
    if n <= 3:
        for bits in range(1 << (n * (n + 1))):
            mat = [[(bits >> (r * (n + 1) + c)) & 1 for c in range(n + 1)] for r in range(n)]
            if _gf2_rank(mat) < n:
                constraints.append(_monomial_vector(mat, n, index))
    else:
        rng = random.Random(seed)
        while len(constraints) < 6 * width:
            constraints.append(_monomial_vector(_random_degenerate(n, rng), n, index))
    kernel = _nullspace_gf2(constraints, width)
    if len(kernel) != 1:
        raise DegenerateConfiguration(f"det2 constraints have a {len(kernel)}-dimensional solution space")
    values = tuple(kernel[0])
    if n > 3:
        rng = random.Random(seed + 1)
        for _ in range(200):
            mat = _random_degenerate(n, rng)
            if sum(a & b for a, b in zip(_monomial_vector(mat, n, index), values)) % 2:
                raise DegenerateConfiguration("det2 table fails validation")
    return tuple(keys), values


def _random_degenerate(n: int, rng: random.Random) -> list[list[int]]:
    r = rng.randint(0, n - 1)
    gens = [[rng.randint(0, 1) for _ in range(n)] for _ in range(r)]
    cols = []
    for _ in range(n + 1):
        col = [0] * n
        for g in gens:
            if rng.randint(0, 1):
                col = [a ^ b for a, b in zip(col, g)]
        cols.append(col)
    return [[cols[c][r_] for c in range(n + 1)] for r_ in range(n)]


def det2(mat: Sequence[Sequence[int]]) -> int:
    """The 2-determinant of an integer matrix with n rows and n+1 columns."""
    n = len(mat)
    if n == 0 or any(len(row) != n + 1 for row in mat):
        raise PreconditionError("det2 needs an n x (n+1) matrix")
    m2 = [[int(x) % 2 for x in row] for row in mat]
    keys, values = det2_table(n)
    index = {k: i for i, k in enumerate(keys)}
    vec = _monomial_vector(m2, n, index)
    return sum(a & b for a, b in zip(vec, values)) % 2


# ---------------------------------------------------------------------------
# Parshin symbols
# ---------------------------------------------------------------------------

def symbol_exponents(a_parts: Sequence[Sequence[int]], b: Sequence[int]) -> list[int]:
    """Exponent of ``f_i(a_i)``: minus the determinant with ``b`` in slot ``i``."""
    n = len(a_parts)
    out = []
    for i in range(n):
        cols = [list(a_parts[j]) if j != i else list(b) for j in range(n)]
        out.append(-la.int_det(la.transpose(cols)))
    return out


def parshin_symbol(fs: Sequence[LaurentPoly], b: Sequence[int],
                   a_parts: Sequence[Sequence[int]]) -> GaussianRational:
    n = len(fs)
    if len(a_parts) != n or any(len(a) != n for a in a_parts) or len(b) != n:
        raise PreconditionError("Parshin symbol needs n polynomials, n vertex parts and b in Z^n")
    coeffs = [f.coefficient(a) for f, a in zip(fs, a_parts)]
    if any(not c for c in coeffs):
        raise PreconditionError("zero vertex coefficient in Parshin symbol")
    sign_bit = det2([[int(a_parts[j][r]) for j in range(n)] + [int(b[r])] for r in range(n)])
    result = GaussianRational(-1 if sign_bit else 1, 0)
    for c, e in zip(coeffs, symbol_exponents(a_parts, b)):
        result = result * c ** e
    return result


# ---------------------------------------------------------------------------
# boundary complexes and local degrees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryCell:
    points: frozenset[Vec]       # projected vertices in R^n
    dim: int
    active: frozenset[int]       # i with B_i not a point
    parts: tuple[Vec, ...] = ()  # for 0-cells: the vertices a_i with a = sum a_i


@dataclass(frozen=True)
class DegreeChart:
    """Boundary cells incident to a vertex together with an interior point."""

    vertex: Vec
    cells: tuple[BoundaryCell, ...]
    center: Vec
    n: int


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def combinatorial_coefficient(chart: DegreeChart, order: Sequence[int] | None = None,
                              orientation: int = 1) -> int:
    """Local degree at ``chart.vertex`` of the face-incidence map to the
    boundary of the positive octant, via the barycentric subdivision."""
    n = chart.n
    order = list(range(n)) if order is None else list(order)
    full = frozenset(range(n))
    for cell in chart.cells:
        if cell.active == full:
            raise NotDeveloped("boundary cell where no summand is a vertex")
    by_dim: dict[int, list[BoundaryCell]] = {}
    for cell in chart.cells:
        by_dim.setdefault(cell.dim, []).append(cell)
    start = [c for c in by_dim.get(0, []) if c.points == frozenset([chart.vertex])]
    if not start or start[0].active:
        raise PreconditionError("chart vertex is not a vertex of the boundary complex")
    chain = [frozenset(order[:j]) for j in range(n)]
    target = [[0] * n for _ in range(n)]
    target[0][order[n - 1]] = -1
    for j in range(1, n):
        for i in order[:j]:
            target[j][i] = 1
    target_sign = _sign(la.int_det(target))
    a = chart.vertex
    normal = vec_sub(a, chart.center)
    total = 0

    def walk(flag: list[BoundaryCell]):
        nonlocal total
        j = len(flag)
        if j == n:
            rows = [normal] + [vec_sub(_barycenter(c), a) for c in flag[1:]]
            s = _sign(la.det(rows))
            if s == 0:
                raise DegenerateConfiguration("degenerate flag simplex")
            total += s * target_sign
            return
        for cell in by_dim.get(j, []):
            if cell.active == chain[j] and flag[-1].points < cell.points:
                walk(flag + [cell])

    walk([start[0]])
    return orientation * total


def _barycenter(cell: BoundaryCell) -> Vec:
    pts = list(cell.points)
    return vec_scale(Fraction(1, len(pts)), tuple(map(sum, zip(*pts))))


def _center(poly: Polytope) -> Vec:
    return vec_scale(Fraction(1, len(poly.vertices)), tuple(map(sum, zip(*poly.vertices))))


def boundary_cells(As: Sequence[Polytope]) -> tuple[Polytope, list[BoundaryCell]]:
    """Proper faces of the Minkowski sum with their summand decomposition."""
    total = minkowski_sum_all(list(As))
    cells = []
    for face, dim in total.faces.items():
        if dim >= total.ambient_dim:
            continue
        gamma = face_normal(total, face)
        parts = [support_face(a, gamma)[1] for a in As]
        active = frozenset(i for i, p in enumerate(parts) if not p.is_point())
        pts = frozenset(total.vertices[i] for i in face)
        vparts = tuple(p.vertices[0] for p in parts) if dim == 0 else ()
        cells.append(BoundaryCell(pts, dim, active, vparts))
    return total, cells


def degree_charts(As: Sequence[Polytope]) -> list[tuple[BoundaryCell, DegreeChart]]:
    """One chart per vertex of the Minkowski sum (face-lattice route)."""
    total, cells = boundary_cells(As)
    if total.dim < total.ambient_dim:
        raise DegenerateConfiguration("Minkowski sum is not full-dimensional")
    return _charts(cells, _center(total), total.ambient_dim)


def _charts(cells: list[BoundaryCell], center: Vec, n: int):
    out = []
    for cell in cells:
        if cell.dim != 0:
            continue
        (a,) = tuple(cell.points)
        incident = tuple(c for c in cells if a in c.points)
        out.append((cell, DegreeChart(a, incident, center, n)))
    out.sort(key=lambda pair: pair[1].vertex)
    return out


# ---------------------------------------------------------------------------
# developed polytopes and lifts
# ---------------------------------------------------------------------------

def _face_tuples(As: Sequence[Polytope], max_dim: int):
    total = minkowski_sum_all(list(As))
    for face, dim in total.faces.items():
        if dim > max_dim:
            continue
        gamma = face_normal(total, face)
        yield dim, total.face_polytope(face), [support_face(a, gamma)[1] for a in As]


def is_developed(As: Sequence[Polytope]) -> bool:
    """Every face tuple summing to a face of dimension < len(As) contains a vertex."""
    return all(any(p.is_point() for p in parts) for _, _, parts in _face_tuples(As, len(As) - 1))


def is_developed_wrt(As: Sequence[Polytope], b: Sequence) -> bool:
    """Developed, except for faces containing a segment parallel to ``b``."""
    for dim, face, parts in _face_tuples(As, len(As) - 1):
        if any(p.is_point() for p in parts):
            continue
        base = face.vertices[0]
        dirs = [vec_sub(v, base) for v in face.vertices[1:]]
        if dirs and la.rank(dirs + [list(b)]) == la.rank(dirs):
            continue
        return False
    return True


@dataclass(frozen=True)
class LiftedPolyhedron:
    """A polytope with a concave piecewise-linear lift given on generating points."""

    points: tuple[Vec, ...]
    values: tuple[Fraction, ...]

    @classmethod
    def of(cls, pairs) -> "LiftedPolyhedron":
        pts, vals = [], []
        for p, v in pairs:
            pts.append(tuple(Fraction(x) for x in p))
            vals.append(Fraction(v))
        lifted = cls(tuple(pts), tuple(vals))
        if not lifted.is_concave():
            raise PreconditionError("lift values are not concave (a point lies below the upper hull)")
        return lifted

    @classmethod
    def zero(cls, poly: Polytope) -> "LiftedPolyhedron":
        return cls(tuple(poly.vertices), tuple(Fraction(0) for _ in poly.vertices))

    @property
    def base(self) -> Polytope:
        return convex_hull(self.points)

    def lifted(self) -> list[Vec]:
        return [p + (v,) for p, v in zip(self.points, self.values)]

    def is_concave(self) -> bool:
        pts = self.lifted()
        hull = convex_hull(pts + [p[:-1] + (p[-1] - 1,) for p in pts])
        uppers = [f for f in hull.facets if f.normal[-1] > 0]
        if hull.dim < len(pts[0]):
            return True
        return all(any(pairing(f.normal, q) == f.value for f in uppers) for q in pts)


def lifted_boundary_cells(lifts: Sequence[LiftedPolyhedron]) -> tuple[Polytope, list[BoundaryCell]]:
    """Cells of the boundary of the bounded part of the sum of lifted polyhedra."""
    n = len(lifts[0].points[0])
    liftpts = [lf.lifted() for lf in lifts]
    top = convex_hull(vec_add_all(choice) for choice in product(*liftpts))
    tops = list(top.vertices)
    poly = convex_hull(tops + [q[:-1] + (q[-1] - 1,) for q in tops])
    base = convex_hull(q[:-1] for q in tops)
    if base.dim < n:
        raise DegenerateConfiguration("sum of the base polytopes is not full-dimensional")
    top_ids = frozenset(i for i, q in enumerate(poly.vertices) if q in set(tops))
    vertical = [f.vertex_ids for f in poly.facets if f.normal[-1] == 0]
    cells = []
    for face, dim in poly.faces.items():
        if not face <= top_ids or dim >= n:
            continue
        if not any(face <= vf for vf in vertical):
            continue
        lam = face_normal(poly, face)
        parts = []
        for pts in liftpts:
            vals = [pairing(lam, q) for q in pts]
            best = max(vals)
            parts.append({q[:-1] for q, v in zip(pts, vals) if v == best})
        active = frozenset(i for i, p in enumerate(parts) if len(p) > 1)
        proj = frozenset(poly.vertices[i][:-1] for i in face)
        vparts = tuple(next(iter(p)) for p in parts) if dim == 0 else ()
        cells.append(BoundaryCell(proj, dim, active, vparts))
    return base, cells


def vec_add_all(vs) -> Vec:
    vs = list(vs)
    acc = vs[0]
    for v in vs[1:]:
        acc = vec_add(acc, v)
    return acc


def is_developed_functions(lifts: Sequence[LiftedPolyhedron]) -> bool:
    """Every boundary cell of the lifted sum has a point summand."""
    _, cells = lifted_boundary_cells(lifts)
    full = frozenset(range(len(lifts)))
    return all(c.active != full for c in cells)


def random_lifts(As: Sequence[Polytope], rng: random.Random, spread: int = 6) -> list[LiftedPolyhedron]:
    return [LiftedPolyhedron(tuple(a.vertices), tuple(Fraction(rng.randint(0, spread)) for _ in a.vertices))
            for a in As]


def auto_lifts(As: Sequence[Polytope], seed: int = _SEED, attempts: int = 64) -> list[LiftedPolyhedron]:
    rng = random.Random(seed)
    for _ in range(attempts):
        lifts = random_lifts(As, rng)
        _, cells = lifted_boundary_cells(lifts)
        full = frozenset(range(len(As)))
        if all(c.active != full for c in cells) and all(
                all(x.denominator == 1 for p in c.points for x in p) for c in cells if c.dim == 0):
            return lifts
    raise NotDeveloped(f"no developed lift found in {attempts} attempts")


# ---------------------------------------------------------------------------
# product over roots
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VertexTerm:
    vertex: Vec
    parts: tuple[Vec, ...]
    coefficient: int
    symbol: GaussianRational


@dataclass(frozen=True)
class ProductResult:
    value: GaussianRational
    terms: tuple[VertexTerm, ...]
    route: str


def _product(fs, b, cells, center, n, route) -> ProductResult:
    value = ONE
    terms = []
    for cell, chart in _charts(cells, center, n):
        c = combinatorial_coefficient(chart)
        if c == 0:
            continue
        sym = parshin_symbol(fs, b, cell.parts)
        value = value * sym ** (_sign_pow(n) * c)
        terms.append(VertexTerm(chart.vertex, cell.parts, c, sym))
    return ProductResult(value, tuple(terms), route)


def _sign_pow(n: int) -> int:
    return -1 if n % 2 else 1


def kh_product(fs: Sequence[LaurentPoly], b: Sequence[int],
               lifts: Sequence[LiftedPolyhedron] | None = None, seed: int = _SEED) -> ProductResult:
    """Product of ``x^b`` over the roots as a monomial in vertex coefficients."""
    n = len(fs)
    if any(f.nvars != n for f in fs):
        raise PreconditionError("need n polynomials in n variables")
    As = [newton_polytope(f) for f in fs]
    if lifts is None and is_developed(As):
        total, cells = boundary_cells(As)
        if total.dim < n:
            raise DegenerateConfiguration("Minkowski sum is not full-dimensional")
        return _product(fs, b, cells, _center(total), n, "developed")
    if lifts is None:
        if not is_developed_wrt(As, b):
            raise NotDeveloped("Newton polytopes are not developed with respect to the exponent")
        lifts = auto_lifts(As, seed)
    else:
        if [lf.base for lf in lifts] != As:
            raise PreconditionError("lifts must live over the Newton polytopes")
        if not is_developed_functions(lifts):
            raise NotDeveloped("supplied lifts are not developed")
    base, cells = lifted_boundary_cells(lifts)
    return _product(fs, b, cells, _center(base), n, "lifted")


# ---------------------------------------------------------------------------
# residues and the sum over roots
# ---------------------------------------------------------------------------

def _outer_normal_sum(poly: Polytope, vertex: Vec) -> tuple[int, ...]:
    idx = poly.vertices.index(vertex)
    acc = [0] * poly.ambient_dim
    for f in poly.facets:
        if idx in f.vertex_ids:
            acc = [x + y for x, y in zip(acc, f.normal)]
    return tuple(acc)


def gk_residue(fs: Sequence[LaurentPoly], g: LaurentPoly, a: Sequence[int]) -> GaussianRational:
    """Constant term of ``g / p`` expanded at the vertex ``a`` of the Newton
    polytope of ``p = prod f_i``."""
    n = g.nvars
    p = fs[0]
    for f in fs[1:]:
        p = p * f
    a = tuple(int(x) for x in a)
    poly = newton_polytope(p)
    if tuple(Fraction(x) for x in a) not in poly.vertices:
        raise PreconditionError(f"{a} is not a vertex of the Newton polytope of the product")
    ca = p.coefficient(a)
    if not ca:
        raise PreconditionError("vanishing vertex coefficient")
    w = _outer_normal_sum(poly, tuple(Fraction(x) for x in a))
    q_terms = []
    for e, c in p.items:
        if e == a:
            continue
        d = tuple(x - y for x, y in zip(e, a))
        deg = sum(x * y for x, y in zip(w, d))
        assert deg < 0, "grading covector is not negative on the vertex cone"
        q_terms.append((d, -c / ca, deg))
    gshift = [(tuple(x - y for x, y in zip(e, a)), c) for e, c in g.items]
    top = max((sum(x * y for x, y in zip(w, d)) for d, _ in gshift), default=0)
    if top < 0:
        return ZERO
    # series sum_j (-q)^j truncated below w-degree -top
    series: dict[tuple[int, ...], GaussianRational] = {(0,) * n: ONE}
    power = dict(series)
    while power:
        nxt: dict[tuple[int, ...], GaussianRational] = {}
        for e1, c1 in power.items():
            d1 = sum(x * y for x, y in zip(w, e1))
            for e2, c2, d2 in q_terms:
                if d1 + d2 < -top:
                    continue
                e = tuple(x + y for x, y in zip(e1, e2))
                nxt[e] = nxt.get(e, ZERO) + c1 * c2
        power = {e: c for e, c in nxt.items() if c}
        for e, c in power.items():
            series[e] = series.get(e, ZERO) + c
    total = ZERO
    for d, c in gshift:
        neg = tuple(-x for x in d)
        if neg in series:
            total = total + c * series[neg]
    return total / ca


def polynomial_det(mat: Sequence[Sequence[LaurentPoly]]) -> LaurentPoly:
    n = len(mat)
    total = LaurentPoly.zero(mat[0][0].nvars)
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = LaurentPoly.constant(total.nvars, -1 if inv % 2 else 1)
        for i in range(n):
            term = term * mat[i][perm[i]]
        total = total + term
    return total


def log_jacobian(fs: Sequence[LaurentPoly]) -> LaurentPoly:
    """``det(x_j d f_i / d x_j)``, the Jacobian times ``x_1...x_n``."""
    return polynomial_det([[f.log_derivative(j) for j in range(len(fs))] for f in fs])


@dataclass(frozen=True)
class SumResult:
    value: GaussianRational
    residues: tuple[tuple[Vec, int, GaussianRational], ...]


def gk_sum(fs: Sequence[LaurentPoly], h: LaurentPoly) -> SumResult:
    """Sum of ``h`` over the roots of a system with developed Newton polytopes."""
    n = len(fs)
    if any(f.nvars != n for f in fs) or h.nvars != n:
        raise PreconditionError("need n polynomials in n variables")
    As = [newton_polytope(f) for f in fs]
    if not is_developed(As):
        raise NotDeveloped("Newton polytopes are not developed")
    g = h * log_jacobian(fs)
    total = ZERO
    parts = []
    for cell, chart in degree_charts(As):
        c = combinatorial_coefficient(chart)
        if c == 0 or g.is_zero():
            continue
        res = gk_residue(fs, g, [int(x) for x in chart.vertex])
        total = total + res * c
        parts.append((chart.vertex, c, res))
    return SumResult(total * _sign_pow(n), tuple(parts))


# ---------------------------------------------------------------------------
# vertex coefficient ratios
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VertexRatio:
    b1: tuple[int, ...]
    b2: tuple[int, ...]
    sign: int
    product: GaussianRational | complex
    ratio: GaussianRational | complex
    route: str


def _check_vertex_genericity(As: Sequence[Polytope], k: int, gamma: Sequence[int]):
    total = minkowski_sum_all(list(As))
    groups: dict[tuple, list] = {}
    for pt in lattice_points(total):
        groups.setdefault(pt[:k], []).append(pt[k:])
    for fiber in groups.values():
        vals = [pairing(gamma, q) for q in fiber]
        if vals.count(max(vals)) > 1:
            raise NotGeneric(f"covector {tuple(gamma)} is not generic for the slices of the sum")


def vertex_ratio(fs: Sequence[LaurentPoly], k: int, gamma1: Sequence[int], gamma2: Sequence[int],
                 route: str = "auto", seed: int = _SEED) -> VertexRatio:
    """Ratio of the composite polynomial's coefficients at the vertices
    maximizing ``gamma1`` and ``gamma2``.

    The polynomials live on ``(C*)^k x (C*)^{n-k}`` (first ``k`` variables
    are eliminated); the composite polytope is taken canonically shifted.
    """
    n = fs[0].nvars
    if len(fs) != k + 1:
        raise PreconditionError(f"need k+1 = {k + 1} polynomials")
    if any(int(g) <= 0 for g in list(gamma1) + list(gamma2)):
        raise PreconditionError("covectors must have positive integer components")
    As = [newton_polytope(f) for f in fs]
    for a in As:
        for i in range(n):
            if min(v[i] for v in a.vertices) != 0:
                raise PreconditionError("Newton polytopes must touch every coordinate hyperplane")
    for g in (gamma1, gamma2):
        _check_vertex_genericity(As, k, g)
    pi_x = standard_projection(n, k)
    chart = _Chart.of(pi_x)
    raw = composite_newton_polytope(As, pi_x, shift=False)
    low = [min(v[i] for v in raw.vertices) for i in range(n - k)]
    bs = []
    for g in (gamma1, gamma2):
        top = support_face(raw, g)[1]
        if not top.is_point():
            raise NotGeneric("covector does not select a single vertex of the composite polytope")
        shifted = tuple(int(x - y) for x, y in zip(top.vertices[0], low))
        # cross-check with the mixed-moment sum when the covector is generic enough
        gl = chart.covector_to_l(g)
        try:
            vert = vec_scale(factorial(k + 1), mf_vertex(As, chart.ctx, gl))
        except NotGeneric:
            vert = None
        if vert is not None:
            vpi = chart.point_to_pi(chart.ctx.lcoords(vert))
            if tuple(int(x - y) for x, y in zip(vpi, low)) != shifted:
                raise AssertionError("mixed-moment vertex disagrees with the composite polytope")
        bs.append(shifted)
    b1, b2 = bs
    exponent = sum(int(g) * x for g, x in zip(gamma1, b1)) + sum(int(g) * x for g, x in zip(gamma2, b2))
    sign = -1 if exponent % 2 else 1
    tilde = [substitute_binomials(f, k, gamma1, gamma2) for f in fs]
    et = tuple([0] * k + [1])
    used = route
    product_value = None
    if route in ("auto", "formula"):
        tas = [newton_polytope(f) for f in tilde]
        if is_developed_wrt(tas, et):
            product_value = kh_product(tilde, et, seed=seed).value
            used = "formula"
        elif route == "formula":
            raise NotDeveloped("substituted polytopes are not developed with respect to t")
    if product_value is None:
        from . import oracle
        if k + 1 > 2 and oracle.as_binomial_system(tilde) is None:
            raise PreconditionError("no route to the product over roots for this system")
        product_value = oracle.product_over_roots(et, oracle.solve(tilde, seed=seed))
        used = "oracle"
    ratio = product_value * sign
    return VertexRatio(b1, b2, sign, product_value, ratio, used)


# ---------------------------------------------------------------------------
# square-free multiplicity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MultiplicityReport:
    d: int
    branch: str                       # "degenerate" | "essential-subset"
    subset: tuple[int, ...] = ()
    sublattice: tuple[tuple[int, ...], ...] = ()
    index: int = 1
    mixed_volume: Fraction = Fraction(1)


def _as_sets(As) -> list[list[tuple[int, ...]]]:
    out = []
    for a in As:
        pts = a.vertices if isinstance(a, Polytope) else a
        out.append([tuple(int(x) for x in p) for p in pts])
    return out


def _sum_sets(sets: Sequence[list[tuple[int, ...]]]) -> list[tuple[int, ...]]:
    acc = {tuple(0 for _ in sets[0][0])}
    for s in sets:
        acc = {tuple(x + y for x, y in zip(a, b)) for a in acc for b in s}
    return sorted(acc)


def _quotient_dim(points: Sequence[Sequence[int]], ctx: ProjectionContext) -> int:
    proj = [ctx.p(q) for q in points]
    base = proj[0]
    diffs = [vec_sub(q, base) for q in proj[1:]]
    return la.rank(diffs) if diffs and ctx.k else 0


def _lattice_generators(points: Sequence[Sequence[int]], sub: Subspace) -> list[list[int]]:
    base = points[0]
    gens = [[int(x - y) for x, y in zip(q, base)] for q in points[1:]]
    gens += [list(map(int, b)) for b in sub.basis]
    return [g for g in gens if any(g)]


def _index_in_saturation(gens: list[list[int]]) -> tuple[int, int]:
    """(rank, index of the generated lattice in its saturation)."""
    if not gens:
        return 0, 1
    _, d, _ = la.smith_normal_form(gens)
    idx, rank = 1, 0
    for i in range(min(len(d), len(d[0]))):
        if d[i][i]:
            idx *= d[i][i]
            rank += 1
    return rank, idx


def sqfree_multiplicity(As, L: Subspace) -> MultiplicityReport:
    sets = _as_sets(As)
    ctx = ProjectionContext.from_subspace(L)
    k = ctx.k
    if len(sets) != k + 1:
        raise PreconditionError(f"need k+1 = {k + 1} sets for a subspace of codimension {k}")
    dims = {}
    for q in range(1, k + 2):
        for sub in combinations(range(k + 1), q):
            dims[sub] = _quotient_dim(_sum_sets([sets[i] for i in sub]), ctx)
            if dims[sub] < q - 1:
                return MultiplicityReport(0, "degenerate", sub)
    tight = [s for s, d in dims.items() if d == len(s) - 1]
    minimal = [s for s in tight if not any(set(t) < set(s) for t in tight)]
    minimal.sort(key=lambda s: (len(s), s))
    chosen = minimal[0]
    q = len(chosen)
    total = _sum_sets([sets[i] for i in chosen])
    gens = _lattice_generators(total, L)
    rank, index = _index_in_saturation(gens)
    if ctx.n - rank != k + 1 - q:
        raise DegenerateConfiguration("sublattice has unexpected codimension")
    rest = [j for j in range(k + 1) if j not in chosen]
    if not rest:
        return MultiplicityReport(index, "essential-subset", chosen, tuple(map(tuple, gens)), index, Fraction(1))
    sat = Subspace.span(gens, ctx.n)
    rctx = ProjectionContext.from_subspace(sat)
    projected = [convex_hull(rctx.p(pt) for pt in sets[j]) for j in rest]
    mv = mixed_volume(projected)
    d = factorial(len(rest)) * mv * index
    if d.denominator != 1:
        raise DegenerateConfiguration("non-integral multiplicity")
    return MultiplicityReport(int(d), "essential-subset", chosen, tuple(map(tuple, gens)), index, mv)


def is_essential(As, L: Subspace) -> bool:
    sets = _as_sets(As)
    ctx = ProjectionContext.from_subspace(L)
    k = ctx.k
    if len(sets) != k + 1:
        raise PreconditionError(f"need k+1 = {k + 1} sets")
    for q in range(1, k + 1):
        for sub in combinations(range(k + 1), q):
            if _quotient_dim(_sum_sets([sets[i] for i in sub]), ctx) <= q - 1:
                return False
    gens = _lattice_generators(_sum_sets(sets), L)
    rank, index = _index_in_saturation(gens)
    return rank == ctx.n and index == 1
