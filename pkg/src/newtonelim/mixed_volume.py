"""Mixed volumes of polytopes, virtual polytopes and polyhedral pairs."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import factorial
from typing import Sequence

from . import _linalg as la
from .errors import DegenerateConfiguration, DimensionMismatch, NotWellDefined, PreconditionError
from .lattice_geom import (
    Polytope,
    Subspace,
    Vec,
    VirtualPolytope,
    as_vec,
    convex_hull,
    linear_span,
    minkowski_sum,
    pairing,
    point,
    support_face,
    vec_add,
    vec_sub,
)


@dataclass(frozen=True)
class VolumeForm:
    """Lattice-unimodular volume form on the span of a saturated lattice basis."""

    lattice_basis: Subspace

    @classmethod
    def standard(cls, n: int) -> "VolumeForm":
        basis = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        return cls(Subspace(n, basis))

    @property
    def dim(self) -> int:
        return self.lattice_basis.dim

    def coordinates(self, v: Sequence) -> Vec:
        """Coordinates of a vector of the subspace in the lattice basis."""
        basis = self.lattice_basis.basis
        sol = la.solve(la.transpose(basis), list(v))
        if sol is None:
            raise PreconditionError("vector does not lie in the volume form's subspace")
        return tuple(sol)


def to_coordinates(p: Polytope, form: VolumeForm) -> Polytope:
    """Translate ``p`` to the origin and express it in ``form``'s lattice basis."""
    base = p.vertices[0]
    return convex_hull(form.coordinates(vec_sub(v, base)) for v in p.vertices)


def _simplex_volume(pts: Sequence[Vec]) -> Fraction:
    d = len(pts) - 1
    edges = [vec_sub(q, pts[0]) for q in pts[1:]]
    return abs(la.det(edges)) / factorial(d)


def volume(p: Polytope, form: VolumeForm | None = None) -> Fraction:
    """Volume by pulling triangulation; zero for lower-dimensional polytopes."""
    if form is not None:
        if not all(form.lattice_basis.contains(vec_sub(v, p.vertices[0])) for v in p.vertices):
            raise PreconditionError("polytope is not parallel to the volume form's subspace")
        return volume(to_coordinates(p, form))
    n = p.ambient_dim
    if p.dim < n:
        return Fraction(0)
    total = Fraction(0)
    for simplex in p.triangulation:
        total += _simplex_volume([p.vertices[i] for i in simplex])
    return total


def _subset_sums(polys: Sequence[Polytope]) -> dict[tuple[int, ...], Polytope]:
    sums: dict[tuple[int, ...], Polytope] = {}
    for size in range(1, len(polys) + 1):
        for subset in combinations(range(len(polys)), size):
            if size == 1:
                sums[subset] = polys[subset[0]]
            else:
                sums[subset] = minkowski_sum(sums[subset[:-1]], polys[subset[-1]])
    return sums


def mixed_volume(polys: Sequence[Polytope], form: VolumeForm | None = None) -> Fraction:
    """Mixed volume by inclusion-exclusion over all subset sums."""
    m = len(polys)
    if m == 0:
        raise PreconditionError("mixed volume of an empty collection")
    if form is not None:
        polys = [to_coordinates(p, form) for p in polys]
    n = p_dim(polys)
    if n != m:
        raise PreconditionError(f"need {n} polytopes in dimension {n}, got {m}")
    # identical arguments: plain volume
    if all(p == polys[0] for p in polys):
        return volume(polys[0])
    total = Fraction(0)
    for subset, s in _subset_sums(polys).items():
        sign = -1 if (m - len(subset)) % 2 else 1
        total += sign * volume(s)
    return total / factorial(m)


def p_dim(polys: Sequence[Polytope]) -> int:
    dims = {p.ambient_dim for p in polys}
    if len(dims) != 1:
        raise DimensionMismatch(f"ambient dimensions differ: {sorted(dims)}")
    return dims.pop()


def normalized_mixed_volume(polys: Sequence[Polytope]) -> Fraction:
    """``n! * MV``, the number of roots of a generic system."""
    return factorial(len(polys)) * mixed_volume(polys)


def mixed_volume_virtual(virtuals: Sequence[VirtualPolytope], form: VolumeForm | None = None) -> Fraction:
    """Multilinear extension of the mixed volume to virtual polytopes."""
    total = Fraction(0)
    for choice in product((0, 1), repeat=len(virtuals)):
        args = [v.minus if c else v.plus for v, c in zip(virtuals, choice)]
        sign = -1 if sum(choice) % 2 else 1
        total += sign * mixed_volume(args, form)
    return total


def bernstein_vanishing(polys: Sequence[Polytope]) -> bool:
    """True iff some q of the polytopes sum to something of dimension < q."""
    n = p_dim(polys)
    if len(polys) != n:
        raise PreconditionError(f"need {n} polytopes in dimension {n}")
    spans = [linear_span(p) for p in polys]
    for q in range(1, n + 1):
        for subset in combinations(range(n), q):
            basis = [b for i in subset for b in spans[i].basis]
            if (la.rank(basis) if basis else 0) < q:
                return True
    return False


def hyperplane_form(normal: Sequence[int]) -> VolumeForm:
    """Lattice volume form on ``ker(normal)`` (the quotient form mu/gamma)."""
    n = len(normal)
    kernel = la.nullspace([list(normal)], n)
    return VolumeForm(Subspace.span(kernel, n))


def face_mixed_volume(faces: Sequence[Polytope], normal: Sequence[int]) -> Fraction:
    """Mixed volume of polytopes parallel to ``ker(normal)`` w.r.t. mu/normal."""
    form = hyperplane_form(normal)
    coords = [to_coordinates(f, form) for f in faces]
    if not coords:
        return Fraction(1)
    return mixed_volume(coords)


def primitive_normal(normal: Sequence) -> tuple[int, ...]:
    return tuple(la.integer_scale(normal))


def mv_face_decomposition(delta: Polytope, others: Sequence[Polytope],
                          form: VolumeForm | None = None) -> Fraction:
    """Mixed volume via the sum over facet normals of the sum of ``others``."""
    m = delta.ambient_dim
    if len(others) != m - 1:
        raise PreconditionError(f"need {m - 1} further polytopes in dimension {m}")
    total_b = others[0]
    for b in others[1:]:
        total_b = minkowski_sum(total_b, b)
    if total_b.dim < m:
        raise DegenerateConfiguration("sum of the remaining polytopes is not full-dimensional")
    acc = Fraction(0)
    for facet in total_b.facets:
        gamma = primitive_normal(facet.normal)
        faces = [support_face(b, gamma)[1] for b in others]
        acc += delta.support(gamma) * face_mixed_volume(faces, gamma)
    return acc / m


# ---------------------------------------------------------------------------
# polyhedra with a recession cone
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Polyhedron:
    """``conv(points) + cone(rays)`` with integer recession directions."""

    points: tuple[Vec, ...]
    rays: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, points, rays=()) -> "Polyhedron":
        pts = tuple(sorted(set(as_vec(p) for p in points)))
        return cls(pts, tuple(tuple(int(x) for x in r) for r in rays))

    @property
    def ambient_dim(self) -> int:
        return len(self.points[0])

    def bounded_covector(self, gamma: Sequence) -> bool:
        return all(pairing(gamma, r) < 0 for r in self.rays)

    def support(self, gamma: Sequence) -> Fraction:
        return max(pairing(gamma, p) for p in self.points)

    def face(self, gamma: Sequence) -> Polytope:
        vals = [pairing(gamma, p) for p in self.points]
        top = max(vals)
        return convex_hull(p for p, v in zip(self.points, vals) if v == top)

    def __add__(self, other: "Polyhedron") -> "Polyhedron":
        pts = convex_hull(vec_add(a, b) for a in self.points for b in other.points).vertices
        return Polyhedron(pts, self.rays)


@dataclass(frozen=True)
class PolyhedronPair:
    """A pair of polyhedra with the same recession cone and bounded
    symmetric difference."""

    outer: Polyhedron
    inner: Polyhedron

    def __post_init__(self):
        if set(self.outer.rays) != set(self.inner.rays):
            raise PreconditionError("pair members must share the recession cone")


def _bounded_facet_normals(total: Polyhedron) -> list[tuple[int, ...]]:
    scale = 1 + max((abs(x) for p in total.points for x in p), default=0)
    pts = list(total.points)
    for r in total.rays:
        pts += [vec_add(p, tuple(scale * x for x in r)) for p in total.points]
    hull = convex_hull(pts)
    if hull.dim < total.ambient_dim:
        return []
    normals = []
    for facet in hull.facets:
        gamma = primitive_normal(facet.normal)
        if total.bounded_covector(gamma):
            normals.append(gamma)
    return normals


def pair_mixed_volume(pairs: Sequence[PolyhedronPair]) -> Fraction:
    """Mixed volume of polyhedral pairs by the sum over bounded facet normals."""
    n = len(pairs)
    if n == 0:
        raise PreconditionError("empty collection of pairs")
    cone = set(pairs[0].outer.rays)
    if any(set(p.outer.rays) != cone for p in pairs):
        raise PreconditionError("pairs do not share the recession cone")
    if pairs[0].outer.ambient_dim != n:
        raise PreconditionError(f"need {pairs[0].outer.ambient_dim} pairs")
    total = pairs[0].outer + pairs[0].inner
    for pr in pairs[1:]:
        total = total + pr.outer + pr.inner
    acc = Fraction(0)
    for gamma in _bounded_facet_normals(total):
        for i, pr in enumerate(pairs):
            diff = pr.outer.support(gamma) - pr.inner.support(gamma)
            if diff == 0:
                continue
            faces = [pairs[j].outer.face(gamma) for j in range(i)]
            faces += [pairs[j].inner.face(gamma) for j in range(i + 1, n)]
            acc += diff * face_mixed_volume(faces, gamma)
    return acc / n


def octant_polyhedron(points) -> Polyhedron:
    pts = [as_vec(p) for p in points]
    if any(x < 0 for p in pts for x in p):
        raise PreconditionError("octant polyhedra live in the non-negative orthant")
    n = len(pts[0])
    rays = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    return Polyhedron.of(pts, rays)


def is_well_defined(polys: Sequence[Polyhedron]) -> bool:
    """Every k-dimensional coordinate plane meets at least k polyhedra."""
    n = len(polys)
    for k in range(1, n):
        for plane in combinations(range(n), k):
            off = [j for j in range(n) if j not in plane]
            hits = sum(1 for p in polys if any(all(v[j] == 0 for j in off) for v in p.points))
            if hits < k:
                return False
    return True


def stabilize(p: Polyhedron, far: int) -> Polyhedron:
    """A ``far``-far stabilization: hull with the simplex cut ``sum x >= T``."""
    n = p.ambient_dim
    t = far * n + 1
    extra = [tuple(Fraction(t) if i == j else Fraction(0) for j in range(n)) for i in range(n)]
    verts = convex_hull(list(p.points) + extra).vertices
    return Polyhedron(verts, p.rays)


def unbounded_mixed_volume(polys: Sequence[Polyhedron]) -> Fraction:
    """Mixed volume of polyhedra parallel to the positive octant."""
    n = len(polys)
    if any(p.ambient_dim != n for p in polys):
        raise PreconditionError(f"need {n} polyhedra in dimension {n}")
    if not is_well_defined(polys):
        raise NotWellDefined("some coordinate plane meets too few polyhedra")
    far = 1 + int(max(x for p in polys for v in p.points for x in v))
    orthant = octant_polyhedron([[0] * n])

    def value(m: int) -> Fraction:
        return pair_mixed_volume([PolyhedronPair(orthant, stabilize(p, m)) for p in polys])

    first, second = value(far), value(2 * far)
    if first != second:
        raise NotWellDefined(f"stabilizations disagree: {first} vs {second}")
    return first
