"""Exact convex geometry over the rationals.

Polytopes are stored by their vertices (V-representation).  Facets,
the face lattice and triangulations are derived lazily with exact
arithmetic: the facet description comes from a double-description
computation on the homogenized point cone, faces are intersections of
facets, and triangulations are pulling triangulations from the
lexicographically smallest vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from itertools import product
from math import gcd
from typing import Iterable, Sequence

from . import _linalg as la
from .errors import DimensionMismatch, PreconditionError

Vec = tuple[Fraction, ...]


def as_rational(x) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def as_vec(coords: Iterable) -> Vec:
    return tuple(as_rational(c) for c in coords)


def vec_add(u: Sequence, v: Sequence) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Sequence, v: Sequence) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(t, u: Sequence) -> Vec:
    return tuple(t * a for a in u)


def pairing(covector: Sequence, v: Sequence) -> Fraction:
    return sum((Fraction(g) * x for g, x in zip(covector, v)), Fraction(0))


# ---------------------------------------------------------------------------
# double description
# ---------------------------------------------------------------------------

def _primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, x)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def _dd_rays(rows: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone ``{y : row . y >= 0 for all rows}``.

    The rows must span the whole space.
    """
    dim = len(rows[0])
    basis: list[int] = []
    for i, row in enumerate(rows):
        if la.rank([rows[j] for j in basis] + [row]) > len(basis):
            basis.append(i)
            if len(basis) == dim:
                break
    inv = la.inverse([rows[j] for j in basis])
    rays = [_primitive(la.integer_scale([inv[r][c] for r in range(dim)])) for c in range(dim)]
    zero = []
    for c in range(dim):
        mask = 0
        for pos, j in enumerate(basis):
            if pos != c:
                mask |= 1 << j
        zero.append(mask)

    need = dim - 2
    in_basis = set(basis)
    for i, row in enumerate(rows):
        if i in in_basis:
            continue
        vals = [sum(a * b for a, b in zip(row, r)) for r in rays]
        pos = [j for j, s in enumerate(vals) if s > 0]
        neg = [j for j, s in enumerate(vals) if s < 0]
        if not neg:
            bit = 1 << i
            zero = [z | bit if vals[j] == 0 else z for j, z in enumerate(zero)]
            continue
        new_rays, new_zero = [], []
        bit = 1 << i
        for j, s in enumerate(vals):
            if s >= 0:
                new_rays.append(rays[j])
                new_zero.append(zero[j] | bit if s == 0 else zero[j])
        for p in pos:
            zp = zero[p]
            for q in neg:
                common = zp & zero[q]
                if bin(common).count("1") < need:
                    continue
                adjacent = True
                for r, zr in enumerate(zero):
                    if r != p and r != q and zr & common == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                sp, sq = vals[p], vals[q]
                ray = _primitive([sp * b - sq * a for a, b in zip(rays[p], rays[q])])
                new_rays.append(ray)
                new_zero.append(common | bit)
        rays, zero = new_rays, new_zero
    return rays


# ---------------------------------------------------------------------------
# hull data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Facet:
    """A facet: outer normal (integer, primitive, on the hull's pivot
    coordinates), the maximal value of the normal, and vertex indices."""

    normal: tuple[int, ...]
    value: Fraction
    vertex_ids: frozenset[int]


@dataclass
class _Hull:
    dim: int
    pivots: list[int]
    facets: list[Facet] = field(default_factory=list)


def _affine_frame(points: Sequence[Vec]) -> tuple[int, list[int]]:
    base = points[0]
    diffs = [vec_sub(p, base) for p in points[1:]]
    if not diffs:
        return 0, []
    _, pivots = la.rref(diffs)
    return len(pivots), pivots


def _extreme_points(points: list[Vec]) -> tuple[list[Vec], _Hull]:
    d, pivots = _affine_frame(points)
    if d == 0:
        return [points[0]], _Hull(0, [])
    proj = [tuple(p[c] for c in pivots) for p in points]
    if d == 1:
        lo = min(range(len(points)), key=lambda i: proj[i])
        hi = max(range(len(points)), key=lambda i: proj[i])
        verts = sorted([points[lo], points[hi]])
        hull = _Hull(1, pivots)
        for v in verts:
            sign = 1 if v == points[hi] else -1
            normal = [0] * len(points[0])
            normal[pivots[0]] = sign
            hull.facets.append(Facet(tuple(normal), sign * v[pivots[0]],
                                     frozenset([verts.index(v)])))
        return verts, hull
    den = 1
    for q in proj:
        for x in q:
            den = la.lcm(den, x.denominator)
    ints = [tuple(int(x * den) for x in q) for q in proj]
    rows = [(1,) + q for q in ints]
    rays = _dd_rays(rows)
    masks = []
    for ray in rays:
        mask = 0
        for i, row in enumerate(rows):
            if sum(a * b for a, b in zip(row, ray)) == 0:
                mask |= 1 << i
        masks.append(mask)
    full = (1 << len(points)) - 1
    vertex_idx = []
    for i in range(len(points)):
        bit = 1 << i
        acc = full
        for mask in masks:
            if mask & bit:
                acc &= mask
        if acc == bit:
            vertex_idx.append(i)
    verts = sorted(points[i] for i in vertex_idx)
    position = {v: j for j, v in enumerate(verts)}
    hull = _Hull(d, pivots)
    n = len(points[0])
    for ray, mask in zip(rays, masks):
        normal = [0] * n
        for c, y in zip(pivots, ray[1:]):
            normal[c] = -y
        ids = frozenset(position[points[i]] for i in vertex_idx if mask >> i & 1)
        some = verts[next(iter(ids))]
        hull.facets.append(Facet(tuple(normal), pairing(normal, some), ids))
    hull.facets.sort(key=lambda f: (sorted(f.vertex_ids), f.normal))
    return verts, hull


# ---------------------------------------------------------------------------
# Polytope
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Polytope:
    """A convex polytope given by its (hull-reduced, sorted) vertex list."""

    vertices: tuple[Vec, ...]

    def __post_init__(self):
        if not self.vertices:
            raise PreconditionError("a polytope needs at least one vertex")

    # -- basic data ---------------------------------------------------------
    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0])

    @cached_property
    def _hull(self) -> _Hull:
        _, hull = _extreme_points(list(self.vertices))
        return hull

    @property
    def dim(self) -> int:
        return self._hull.dim

    @property
    def facets(self) -> list[Facet]:
        return self._hull.facets

    def is_point(self) -> bool:
        return len(self.vertices) == 1

    @cached_property
    def faces(self) -> dict[frozenset[int], int]:
        """All non-empty faces as vertex-index sets, mapped to their dimension."""
        nverts = len(self.vertices)
        top = frozenset(range(nverts))
        found: dict[frozenset[int], int] = {top: self.dim}
        if self.dim == 0:
            return found
        facet_sets = [f.vertex_ids for f in self.facets]
        frontier = set(facet_sets)
        seen = set(frontier)
        while frontier:
            nxt = set()
            for face in frontier:
                for fs in facet_sets:
                    sub = face & fs
                    if sub and sub != face and sub not in seen:
                        seen.add(sub)
                        nxt.add(sub)
            frontier = nxt
        for face in seen:
            found[face] = _affine_dim([self.vertices[i] for i in face])
        return found

    def face_polytope(self, ids: Iterable[int]) -> "Polytope":
        return Polytope(tuple(sorted(self.vertices[i] for i in ids)))

    def faces_of_dim(self, d: int) -> list[frozenset[int]]:
        return sorted((f for f, fd in self.faces.items() if fd == d), key=sorted)

    def subfacets(self, face: frozenset[int]) -> list[frozenset[int]]:
        """Faces of codimension one inside ``face``."""
        fd = self.faces[face]
        return sorted((g for g, gd in self.faces.items() if gd == fd - 1 and g <= face), key=sorted)

    def contains(self, point: Sequence) -> bool:
        point = as_vec(point)
        if self.dim == 0:
            return point == self.vertices[0]
        base = self.vertices[0]
        diff = vec_sub(point, base)
        directions = [vec_sub(v, base) for v in self.vertices[1:]]
        if la.rank(directions + [diff]) > self.dim:
            return False
        return all(pairing(f.normal, point) <= f.value for f in self.facets)

    def support(self, covector: Sequence) -> Fraction:
        return max(pairing(covector, v) for v in self.vertices)

    def translate(self, shift: Sequence) -> "Polytope":
        shift = as_vec(shift)
        return Polytope(tuple(sorted(vec_add(v, shift) for v in self.vertices)))

    def scale(self, t) -> "Polytope":
        t = as_rational(t)
        if t < 0:
            raise PreconditionError("dilation factor must be non-negative")
        return Polytope(tuple(sorted(set(vec_scale(t, v) for v in self.vertices))))

    def __add__(self, other: "Polytope") -> "Polytope":
        return minkowski_sum(self, other)

    def __repr__(self) -> str:
        pts = ", ".join("(" + ",".join(str(x) for x in v) + ")" for v in self.vertices)
        return f"Polytope[{pts}]"

    @cached_property
    def triangulation(self) -> list[tuple[int, ...]]:
        """Pulling triangulation (vertex-index simplices of full dimension)."""
        return _pulling(self, frozenset(range(len(self.vertices))))


def _affine_dim(points: Sequence[Vec]) -> int:
    return _affine_frame(list(points))[0]


def _pulling(poly: Polytope, face: frozenset[int]) -> list[tuple[int, ...]]:
    fd = poly.faces[face]
    apex = min(face, key=lambda i: poly.vertices[i])
    if fd == 0:
        return [(apex,)]
    if fd == 1:
        return [tuple(sorted(face, key=lambda i: poly.vertices[i]))]
    out = []
    for sub in poly.subfacets(face):
        if apex in sub:
            continue
        for simplex in _pulling(poly, sub):
            out.append((apex,) + simplex)
    return out


def convex_hull(points: Iterable[Sequence]) -> Polytope:
    """Polytope spanned by a finite non-empty point set."""
    pts = sorted(set(as_vec(p) for p in points))
    if not pts:
        raise PreconditionError("convex hull of an empty set")
    n = len(pts[0])
    if any(len(p) != n for p in pts):
        raise DimensionMismatch("points of different dimensions")
    verts, hull = _extreme_points(pts)
    poly = Polytope(tuple(verts))
    poly.__dict__["_hull"] = hull
    return poly


def point(coords: Sequence) -> Polytope:
    return Polytope((as_vec(coords),))


def _check_same_dim(*polys: Polytope) -> int:
    dims = {p.ambient_dim for p in polys}
    if len(dims) != 1:
        raise DimensionMismatch(f"ambient dimensions differ: {sorted(dims)}")
    return dims.pop()


def minkowski_sum(p: Polytope, q: Polytope) -> Polytope:
    _check_same_dim(p, q)
    return convex_hull(vec_add(a, b) for a in p.vertices for b in q.vertices)


def minkowski_sum_all(polys: Sequence[Polytope], ambient_dim: int | None = None) -> Polytope:
    if not polys:
        if ambient_dim is None:
            raise PreconditionError("empty Minkowski sum needs an ambient dimension")
        return point([0] * ambient_dim)
    return reduce(minkowski_sum, polys)


def support_face(p: Polytope, covector: Sequence) -> tuple[Fraction, Polytope]:
    """Maximum of the covector on ``p`` and the face where it is attained."""
    if len(covector) != p.ambient_dim:
        raise DimensionMismatch("covector length differs from ambient dimension")
    vals = [pairing(covector, v) for v in p.vertices]
    top = max(vals)
    face = tuple(v for v, x in zip(p.vertices, vals) if x == top)
    return top, Polytope(face)


def face_vertex_ids(p: Polytope, covector: Sequence) -> frozenset[int]:
    vals = [pairing(covector, v) for v in p.vertices]
    top = max(vals)
    return frozenset(i for i, x in enumerate(vals) if x == top)


# ---------------------------------------------------------------------------
# lattice maps and subspaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeMap:
    """Integer matrix acting on column vectors (rows = target dimension)."""

    matrix: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> "LatticeMap":
        return cls(tuple(tuple(int(x) for x in r) for r in rows))

    @property
    def target_dim(self) -> int:
        return len(self.matrix)

    @property
    def source_dim(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    def __call__(self, v: Sequence) -> Vec:
        if len(v) != self.source_dim:
            raise DimensionMismatch("vector does not match the map's source")
        return tuple(pairing(row, v) for row in self.matrix)

    def columns(self) -> list[tuple[int, ...]]:
        return [tuple(r[c] for r in self.matrix) for c in range(self.source_dim)]

    def rank(self) -> int:
        return la.rank(self.matrix)


def map_polytope(p: Polytope, m: LatticeMap) -> Polytope:
    if m.source_dim != p.ambient_dim:
        raise DimensionMismatch("map source dimension differs from polytope dimension")
    return convex_hull(m(v) for v in p.vertices)


@dataclass(frozen=True)
class Subspace:
    """A rational linear subspace with a saturated lattice basis."""

    ambient_dim: int
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        rows = [la.integer_scale(as_vec(v)) for v in vectors]
        rows = [r for r in rows if any(r)]
        if not rows:
            return cls(ambient_dim, ())
        return cls(ambient_dim, tuple(tuple(r) for r in saturate(rows)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence) -> bool:
        if not any(v):
            return True
        return la.rank(list(self.basis) + [list(v)]) == self.dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.ambient_dim == other.ambient_dim and self.dim == other.dim
                and all(other.contains(b) for b in self.basis))

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.dim))

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(list(self.basis) + list(other.basis), self.ambient_dim)

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.dim == 0 or other.dim == 0:
            return Subspace(self.ambient_dim, ())
        # solve sum a_i b_i = sum c_j d_j
        cols = [list(b) for b in self.basis] + [[-x for x in d] for d in other.basis]
        kernel = la.nullspace(la.transpose(cols), len(cols))
        vecs = []
        for k in kernel:
            v = [sum(k[i] * self.basis[i][c] for i in range(self.dim)) for c in range(self.ambient_dim)]
            vecs.append(v)
        return Subspace.span(vecs, self.ambient_dim)


def saturate(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis of (rational row span) intersected with Z^n."""
    _, d, v = la.smith_normal_form(rows)
    r = sum(1 for i in range(min(len(d), len(d[0]))) if d[i][i])
    vinv = la.integer_inverse(v)
    return [list(vinv[i]) for i in range(r)]


def complete_basis(sub: Subspace) -> list[list[int]]:
    """Unimodular matrix whose first rows are a basis of ``sub``."""
    n = sub.ambient_dim
    if sub.dim == 0:
        return la.identity(n)
    _, d, v = la.smith_normal_form(sub.basis)
    vinv = la.integer_inverse(v)
    # first rows of vinv span the saturation of sub's basis, i.e. sub itself
    return [list(r) for r in vinv]


def linear_span(p: Polytope) -> Subspace:
    base = p.vertices[0]
    return Subspace.span([vec_sub(v, base) for v in p.vertices[1:]], p.ambient_dim)


def is_compatible(delta: Polytope, other: Polytope) -> bool:
    """Whether the support function of ``other`` is linear on each maximal
    normal cone of ``delta`` (i.e. the normal fan of ``delta`` refines the
    fan of ``other``)."""
    _check_same_dim(delta, other)
    return len(minkowski_sum(delta, other).vertices) == len(delta.vertices)


# ---------------------------------------------------------------------------
# virtual polytopes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VirtualPolytope:
    """Formal difference ``plus - minus`` of two polytopes."""

    plus: Polytope
    minus: Polytope

    def __post_init__(self):
        _check_same_dim(self.plus, self.minus)

    @classmethod
    def proper(cls, p: Polytope) -> "VirtualPolytope":
        return cls(p, point([0] * p.ambient_dim))

    @property
    def ambient_dim(self) -> int:
        return self.plus.ambient_dim

    def __add__(self, other: "VirtualPolytope") -> "VirtualPolytope":
        return VirtualPolytope(self.plus + other.plus, self.minus + other.minus)

    def __neg__(self) -> "VirtualPolytope":
        return VirtualPolytope(self.minus, self.plus)

    def __sub__(self, other: "VirtualPolytope") -> "VirtualPolytope":
        return self + (-other)

    def scale(self, t) -> "VirtualPolytope":
        t = as_rational(t)
        if t < 0:
            return (-self).scale(-t)
        return VirtualPolytope(self.plus.scale(t), self.minus.scale(t))

    def support(self, covector: Sequence) -> Fraction:
        return self.plus.support(covector) - self.minus.support(covector)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VirtualPolytope):
            return NotImplemented
        return self.plus + other.minus == other.plus + self.minus

    def __hash__(self) -> int:
        return hash(self.ambient_dim)

    def as_polytope(self) -> Polytope | None:
        """The polytope ``C`` with ``C + minus = plus`` if it exists."""
        total = self.plus + self.minus
        grads = set()
        for w in total.vertices:
            # the support function is linear on the normal cone of w; its
            # gradient is the difference of the matching vertices
            gamma = _interior_normal(total, w)
            a = support_face(self.plus, gamma)[1]
            b = support_face(self.minus, gamma)[1]
            grads.add(vec_sub(a.vertices[0], b.vertices[0]))
        candidate = convex_hull(grads)
        return candidate if candidate + self.minus == self.plus else None

    def is_proper(self) -> bool:
        return self.as_polytope() is not None


def _interior_normal(p: Polytope, vertex: Vec) -> tuple[Fraction, ...]:
    """A covector whose unique maximizer on ``p`` is ``vertex``."""
    idx = p.vertices.index(vertex)
    if p.dim == 0:
        return tuple(Fraction(0) for _ in vertex)
    acc = [Fraction(0)] * p.ambient_dim
    for f in p.facets:
        if idx in f.vertex_ids:
            acc = [a + x for a, x in zip(acc, f.normal)]
    return tuple(acc)


def lattice_points(p: Polytope) -> list[tuple[int, ...]]:
    """Integer points of a polytope (brute force over the bounding box)."""
    from math import ceil, floor
    lo = [ceil(min(v[c] for v in p.vertices)) for c in range(p.ambient_dim)]
    hi = [floor(max(v[c] for v in p.vertices)) for c in range(p.ambient_dim)]
    ranges = [range(a, b + 1) for a, b in zip(lo, hi)]
    return [pt for pt in product(*ranges) if p.contains(pt)]


def face_normal(p: Polytope, face: frozenset[int]) -> tuple[Fraction, ...]:
    """A covector whose maximizing face on ``p`` is exactly ``face``
    (zero for the whole polytope)."""
    acc = [Fraction(0)] * p.ambient_dim
    for f in p.facets:
        if face <= f.vertex_ids:
            acc = [a + x for a, x in zip(acc, f.normal)]
    return tuple(acc)
