"""Minkowski integrals, mixed moments, mixed fiber polytopes and composite bodies.

Setting: ``L`` is a rational subspace of ``R^n`` of dimension ``n - k``,
``p`` is the projection onto ``R^n / L`` (identified with ``R^k`` through a
lattice basis) and ``u`` is the projection onto ``L`` along a lattice
complement.  The lattice data is produced from one unimodular matrix whose
first ``n - k`` rows span ``L``; consequently the volume form on the
quotient is lattice-unimodular and ``u(Z^n) = L ∩ Z^n``.

Polytopes living in ``L`` are handled internally in *L-coordinates*
(coordinates with respect to the lattice basis of ``L``); the public
functions return them embedded back into ``R^n``.

Vertices of a Minkowski integral at a covector ``gamma`` on ``L`` come from
the *upper cells* of the lift ``x -> (p(x), gamma(u(x)))``: each upper facet
of the lifted polytope is the image of a face ``Delta^delta`` with
``delta|_L = gamma``; its first moment contributes to the vertex.  Support
values at arbitrary covectors are integrals of the upper envelope of the
same lift, so they need no genericity.  Whole polytopes are rebuilt from
these two oracles by hull refinement.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial
from typing import Callable, Sequence

from . import _linalg as la
from .errors import DimensionMismatch, NotGeneric, PreconditionError
from .lattice_geom import (
    LatticeMap,
    Polytope,
    Subspace,
    Vec,
    complete_basis,
    convex_hull,
    linear_span,
    minkowski_sum,
    minkowski_sum_all,
    pairing,
    point,
    support_face,
    vec_add,
    vec_scale,
    vec_sub,
)
from .mixed_volume import mixed_volume

_RNG_SEED = 20240521


@dataclass(frozen=True)
class ProjectionContext:
    """Lattice data of an elimination problem."""

    n: int
    L: Subspace
    frame: tuple[tuple[int, ...], ...]      # unimodular; first n-k rows span L
    coframe: tuple[tuple[int, ...], ...]    # its inverse: x @ coframe = coordinates

    @classmethod
    def from_subspace(cls, sub: Subspace) -> "ProjectionContext":
        frame = complete_basis(sub)
        coframe = la.integer_inverse(frame)
        ctx = cls(sub.ambient_dim, sub, tuple(map(tuple, frame)), tuple(map(tuple, coframe)))
        ctx._check()
        return ctx

    @classmethod
    def from_lattice_map(cls, pi_x: LatticeMap) -> "ProjectionContext":
        """Context whose ``L`` is the real span of the character embedding."""
        if pi_x.rank() != pi_x.source_dim:
            raise PreconditionError("the character embedding must be injective")
        return cls.from_subspace(Subspace.span(pi_x.columns(), pi_x.target_dim))

    @property
    def k(self) -> int:
        return self.n - self.L.dim

    @property
    def l_dim(self) -> int:
        return self.L.dim

    def _coords(self, x: Sequence) -> tuple[Fraction, ...]:
        return _apply_coframe(self.coframe, tuple(x))

    def lcoords(self, x: Sequence) -> Vec:
        return tuple(self._coords(x)[: self.l_dim])

    def p(self, x: Sequence) -> Vec:
        return tuple(self._coords(x)[self.l_dim:])

    def u(self, x: Sequence) -> Vec:
        return self.embed(self.lcoords(x))

    def embed(self, y: Sequence) -> Vec:
        """Point of ``L`` with the given L-coordinates, as a vector of R^n."""
        return tuple(sum((Fraction(y[j]) * self.frame[j][i] for j in range(self.l_dim)), Fraction(0))
                     for i in range(self.n))

    def lift_covector(self, gamma: Sequence, eta: Sequence = ()) -> Vec:
        """Covector ``gamma o lcoords + eta o p`` on R^n."""
        coeffs = list(gamma) + (list(eta) if eta else [0] * self.k)
        return tuple(sum((Fraction(c) * self.coframe[i][j] for j, c in enumerate(coeffs)), Fraction(0))
                     for i in range(self.n))

    @property
    def p_map(self) -> LatticeMap:
        return LatticeMap.of([[self.coframe[i][self.l_dim + j] for i in range(self.n)] for j in range(self.k)])

    @property
    def u_map(self) -> LatticeMap:
        rows = [[sum(self.coframe[i][j] * self.frame[j][r] for j in range(self.l_dim)) for i in range(self.n)]
                for r in range(self.n)]
        return LatticeMap.of(rows)

    def _check(self):
        for b in self.L.basis:
            if any(self.p(b)):
                raise AssertionError("projection does not vanish on L")
            if self.u(b) != tuple(Fraction(x) for x in b):
                raise AssertionError("section is not the identity on L")

    def to_l(self, poly: Polytope) -> Polytope:
        return convex_hull(self.lcoords(v) for v in poly.vertices)

    def from_l(self, poly: Polytope) -> Polytope:
        return convex_hull(self.embed(v) for v in poly.vertices)


@lru_cache(maxsize=1 << 16)
def _apply_coframe(coframe: tuple[tuple[int, ...], ...], x: tuple) -> tuple[Fraction, ...]:
    n = len(coframe)
    return tuple(sum((Fraction(x[i]) * coframe[i][j] for i in range(n) if coframe[i][j]), Fraction(0))
                 for j in range(n))


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

def _simplex_base_volume(pts: Sequence[Vec], ctx: ProjectionContext) -> Fraction:
    base = [ctx.p(q) for q in pts]
    edges = [vec_sub(q, base[0]) for q in base[1:]]
    return abs(la.det(edges)) / factorial(ctx.k)


def moment(face: Polytope, ctx: ProjectionContext) -> Vec:
    """First moment of ``face`` against the pulled-back quotient volume."""
    if face.ambient_dim != ctx.n:
        raise DimensionMismatch("polytope does not live in the context's space")
    if face.dim > ctx.k:
        raise PreconditionError(f"face of dimension {face.dim} exceeds k = {ctx.k}")
    zero = tuple(Fraction(0) for _ in range(ctx.n))
    if ctx.k == 0:
        return face.vertices[0]
    if face.dim < ctx.k:
        return zero
    acc = zero
    for simplex in face.triangulation:
        pts = [face.vertices[i] for i in simplex]
        vol = _simplex_base_volume(pts, ctx)
        if vol == 0:
            continue
        centroid = vec_scale(Fraction(1, len(pts)), tuple(map(sum, zip(*pts))))
        acc = vec_add(acc, vec_scale(vol, centroid))
    return acc


def _sign(m: int) -> int:
    return -1 if m % 2 else 1


def _span_dim(polys: Sequence[Polytope]) -> int:
    vecs = [vec_sub(v, p.vertices[0]) for p in polys for v in p.vertices[1:]]
    return la.rank(vecs) if vecs else 0


def mixed_moment(polys: Sequence[Polytope], ctx: ProjectionContext) -> Vec:
    """Polarization of the first moment (k+1 polytopes with joint span <= k)."""
    k = ctx.k
    if len(polys) != k + 1:
        raise PreconditionError(f"need {k + 1} polytopes")
    if _span_dim(polys) > k:
        raise PreconditionError("joint span of the arguments exceeds k")
    acc = tuple(Fraction(0) for _ in range(ctx.n))
    for size in range(1, k + 2):
        for subset in combinations(range(k + 1), size):
            m = moment(minkowski_sum_all([polys[i] for i in subset]), ctx)
            acc = vec_add(acc, vec_scale(_sign(k + 1 - size), m))
    return vec_scale(Fraction(1, factorial(k + 1)), acc)


# ---------------------------------------------------------------------------
# upper cells of the lift
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cell:
    """One upper facet of the lift: covector ``delta`` on R^n with
    ``delta|_L = gamma`` and the face ``Delta^delta`` it selects."""

    delta: Vec
    face: Polytope
    lifted: tuple[tuple[Fraction, ...], ...]   # lifted vertices (p(x), height)


def _upper_chain(points: Sequence[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    """Strictly convex upper hull of planar points, left to right."""
    top: dict[Fraction, Fraction] = {}
    for x, h in points:
        if x not in top or h > top[x]:
            top[x] = h
    chain: list[tuple[Fraction, Fraction]] = []
    for q in sorted(top.items()):
        while len(chain) >= 2:
            (ax, ah), (bx, bh) = chain[-2], chain[-1]
            if (bx - ax) * (q[1] - ah) - (bh - ah) * (q[0] - ax) >= 0:
                chain.pop()
            else:
                break
        chain.append(q)
    return chain


def upper_cells(poly: Polytope, ctx: ProjectionContext, gamma: Sequence) -> list[Cell]:
    """Top-dimensional cells of the subdivision of ``p(poly)`` induced by ``gamma``."""
    k = ctx.k
    lifted = {}
    for v in poly.vertices:
        key = ctx.p(v) + (pairing(gamma, ctx.lcoords(v)),)
        lifted.setdefault(key, []).append(v)
    if k == 0:
        top = max(lifted)
        return [Cell(ctx.lift_covector(gamma), Polytope(tuple(sorted(lifted[top]))), (top,))]
    if k == 1:
        chain = _upper_chain(list(lifted))
        cells = []
        for (ax, ah), (bx, bh) in zip(chain, chain[1:]):
            slope = (bh - ah) / (bx - ax)
            tops = [q for q in lifted if ax <= q[0] <= bx and q[1] == ah + slope * (q[0] - ax)]
            verts = sorted(v for q in tops for v in lifted[q])
            cells.append(Cell(ctx.lift_covector(gamma, [-slope]), Polytope(tuple(verts)), tuple(sorted(tops))))
        return cells
    base = convex_hull(ctx.p(v) for v in poly.vertices)
    if base.dim < k:
        return []
    pts = list(lifted)
    pts += [q[:-1] + (q[-1] - 1,) for q in lifted]
    hull = convex_hull(pts)
    cells = []
    for facet in hull.facets:
        c = facet.normal[-1]
        if c <= 0:
            continue
        eta = [Fraction(x, c) for x in facet.normal[:-1]]
        # every lifted point on the facet, not only the extreme ones
        tops = sorted(q for q in lifted if pairing(facet.normal, q) == facet.value)
        verts = sorted(v for q in tops for v in lifted[q])
        cells.append(Cell(ctx.lift_covector(gamma, eta), Polytope(tuple(verts)), tuple(tops)))
    return cells


def _envelope_integral(cell: Cell, k: int) -> Fraction:
    """Integral of the (affine) height over the base of one cell."""
    if k == 1:
        (ax, ah), (bx, bh) = cell.lifted[0], cell.lifted[-1]
        return (bx - ax) * (ah + bh) / 2
    facet = convex_hull(cell.lifted)
    total = Fraction(0)
    for simplex in facet.triangulation:
        pts = [facet.vertices[i] for i in simplex]
        edges = [vec_sub(q[:-1], pts[0][:-1]) for q in pts[1:]]
        vol = abs(la.det(edges)) / factorial(k)
        total += vol * sum(q[-1] for q in pts) / len(pts)
    return total


def minkowski_integral_support(poly: Polytope, ctx: ProjectionContext, nu: Sequence) -> Fraction:
    """Support value of the Minkowski integral at a covector on L (any covector)."""
    if ctx.k == 0:
        return max(pairing(nu, ctx.lcoords(v)) for v in poly.vertices)
    return sum((_envelope_integral(c, ctx.k) for c in upper_cells(poly, ctx, nu)), Fraction(0))


def is_generic(polys: Sequence[Polytope], ctx: ProjectionContext, gamma: Sequence) -> bool:
    """Whether every face tuple selected over ``gamma`` spans at most k dimensions."""
    total = minkowski_sum_all(list(polys))
    for cell in upper_cells(total, ctx, gamma):
        faces = [support_face(p, cell.delta)[1] for p in polys]
        if _span_dim(faces) > ctx.k:
            return False
    return True


def minkowski_integral_vertex(poly: Polytope, ctx: ProjectionContext, gamma: Sequence) -> Vec:
    """Vertex (in L-coordinates) of the Minkowski integral at a generic covector."""
    acc = tuple(Fraction(0) for _ in range(ctx.l_dim))
    for cell in upper_cells(poly, ctx, gamma):
        if cell.face.dim > ctx.k:
            raise NotGeneric(f"covector {tuple(gamma)} selects a face of dimension {cell.face.dim}")
        acc = vec_add(acc, ctx.lcoords(moment(cell.face, ctx)))
    return acc


# ---------------------------------------------------------------------------
# polytope reconstruction from vertex and support oracles
# ---------------------------------------------------------------------------

def reconstruct(vertex_at: Callable[[Sequence[int]], Vec],
                support_at: Callable[[Sequence], Fraction],
                dim: int, seed: int = _RNG_SEED) -> Polytope:
    """Rebuild a polytope of R^dim from exact vertex/support oracles."""
    if dim == 0:
        return point(())
    rng = random.Random(seed)

    def random_covector(scale: int) -> list[int]:
        return [rng.randint(-scale, scale) for _ in range(dim)]

    def generic_vertex(direction: Sequence | None) -> Vec:
        for attempt in range(200):
            if direction is None:
                gamma = random_covector(97)
            else:
                big = 10 ** (2 + attempt // 8)
                gamma = [big * Fraction(d) + rng.randint(-7, 7) for d in direction]
                gamma = la.integer_scale(gamma) if any(gamma) else gamma
            if not any(gamma):
                continue
            try:
                return vertex_at(gamma)
            except NotGeneric:
                continue
        raise RuntimeError("no generic covector found")

    verts = {generic_vertex(None) for _ in range(dim + 1)}
    while True:
        hull = convex_hull(verts)
        grew = False
        directions: list[Sequence] = []
        if hull.dim < dim:
            base = hull.vertices[0]
            diffs = [vec_sub(v, base) for v in hull.vertices[1:]]
            normals = la.nullspace(diffs, dim) if diffs else [
                [Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
            for nrm in normals:
                directions += [nrm, [-x for x in nrm]]
        if not directions:
            directions = [f.normal for f in hull.facets]
        for nu in directions:
            h = support_at(nu)
            cur = max(pairing(nu, v) for v in verts)
            if h > cur:
                for attempt in range(60):
                    w = generic_vertex(nu)
                    if pairing(nu, w) == h:
                        break
                verts.add(w)
                grew = True
            elif h < cur:
                raise AssertionError("vertex oracle returned a point outside the support")
        if not grew:
            return hull


# ---------------------------------------------------------------------------
# Minkowski integral, mixed fiber polytope, composite body
# ---------------------------------------------------------------------------

def minkowski_integral(poly: Polytope, ctx: ProjectionContext, apply_u: bool = True) -> Polytope:
    """The Minkowski integral of ``poly``.

    With ``apply_u`` (default) the result is its image ``u(...)`` in ``L``;
    otherwise the integral itself, which sits in one fiber of ``p`` over the
    first moment of the base.
    """
    if ctx.k > 0 and convex_hull(ctx.p(v) for v in poly.vertices).dim < ctx.k:
        res = point([0] * ctx.n)
        return res
    body = reconstruct(lambda g: minkowski_integral_vertex(poly, ctx, g),
                       lambda nu: minkowski_integral_support(poly, ctx, nu), ctx.l_dim)
    embedded = ctx.from_l(body)
    if apply_u:
        return embedded
    # add back the quotient component: moment of the base, lifted by the frame
    base = convex_hull(ctx.p(v) for v in poly.vertices)
    qmom = _quotient_moment(base, ctx)
    return embedded.translate(qmom)


def _quotient_moment(base: Polytope, ctx: ProjectionContext) -> Vec:
    """The non-L part of the integral of sections: lift of the base's moment."""
    k = ctx.k
    acc = [Fraction(0)] * k
    for simplex in base.triangulation:
        pts = [base.vertices[i] for i in simplex]
        edges = [vec_sub(q, pts[0]) for q in pts[1:]]
        vol = abs(la.det(edges)) / factorial(k)
        for j in range(k):
            acc[j] += vol * sum(q[j] for q in pts) / len(pts)
    return tuple(sum((acc[j] * ctx.frame[ctx.l_dim + j][i] for j in range(k)), Fraction(0))
                 for i in range(ctx.n))


def _polarize(values: Callable[[tuple[int, ...]], object], k: int, add, scale):
    acc = None
    for size in range(1, k + 2):
        for subset in combinations(range(k + 1), size):
            term = scale(_sign(k + 1 - size), values(subset))
            acc = term if acc is None else add(acc, term)
    return scale(Fraction(1, factorial(k + 1)), acc)


class _MixedFiberOracle:
    def __init__(self, polys: Sequence[Polytope], ctx: ProjectionContext):
        if len(polys) != ctx.k + 1:
            raise PreconditionError(f"need k+1 = {ctx.k + 1} polytopes")
        if any(p.ambient_dim != ctx.n for p in polys):
            raise DimensionMismatch("polytopes do not live in the context's space")
        self.ctx = ctx
        self.polys = list(polys)
        self.sums = {}
        for size in range(1, ctx.k + 2):
            for subset in combinations(range(ctx.k + 1), size):
                self.sums[subset] = minkowski_sum_all([self.polys[i] for i in subset])
        self.total = self.sums[tuple(range(ctx.k + 1))]
        self._support_cache: dict[tuple[int, ...], Fraction] = {}

    def vertex(self, gamma: Sequence) -> Vec:
        ctx = self.ctx
        if not is_generic(self.polys, ctx, gamma):
            raise NotGeneric(f"covector {tuple(gamma)} is not generic")
        return _polarize(lambda s: minkowski_integral_vertex(self.sums[s], ctx, gamma), ctx.k,
                         vec_add, lambda t, v: vec_scale(t, v))

    def support(self, nu: Sequence) -> Fraction:
        # support functions are positively homogeneous: cache per primitive direction
        if not any(nu):
            return Fraction(0)
        direction = tuple(la.integer_scale(nu))
        i = next(j for j, x in enumerate(direction) if x)
        factor = Fraction(nu[i]) / direction[i]
        if direction not in self._support_cache:
            ctx = self.ctx
            self._support_cache[direction] = _polarize(
                lambda s: minkowski_integral_support(self.sums[s], ctx, direction), ctx.k,
                lambda a, b: a + b, lambda t, v: t * v)
        return factor * self._support_cache[direction]


def mixed_fiber_l(polys: Sequence[Polytope], ctx: ProjectionContext) -> Polytope:
    """Mixed fiber polytope in L-coordinates."""
    oracle = _MixedFiberOracle(polys, ctx)
    if ctx.l_dim == 0:
        return point(())
    return reconstruct(oracle.vertex, oracle.support, ctx.l_dim)


def mixed_fiber(polys: Sequence[Polytope], ctx: ProjectionContext) -> Polytope:
    """The mixed fiber polytope MF(polys) as a polytope of L inside R^n."""
    return ctx.from_l(mixed_fiber_l(polys, ctx))


@lru_cache(maxsize=64)
def _oracle_for(polys: tuple[Polytope, ...], ctx: ProjectionContext) -> _MixedFiberOracle:
    return _MixedFiberOracle(polys, ctx)


def mixed_fiber_support(polys: Sequence[Polytope], ctx: ProjectionContext, nu: Sequence) -> Fraction:
    """Support value of the mixed fiber polytope at a covector on L-coordinates."""
    return _oracle_for(tuple(polys), ctx).support(nu)


def composite_body_l(polys: Sequence[Polytope], ctx: ProjectionContext) -> Polytope:
    return mixed_fiber_l(polys, ctx).scale(factorial(ctx.k + 1))


def composite_body(polys: Sequence[Polytope], ctx: ProjectionContext) -> Polytope:
    """(k+1)! times the mixed fiber polytope."""
    return ctx.from_l(composite_body_l(polys, ctx))


def mf_vertex(polys: Sequence[Polytope], ctx: ProjectionContext, gamma: Sequence) -> Vec:
    """Vertex of MF at a generic covector via mixed moments of face tuples
    (returned as a point of R^n)."""
    total = minkowski_sum_all(list(polys))
    acc = tuple(Fraction(0) for _ in range(ctx.n))
    for cell in upper_cells(total, ctx, gamma):
        faces = [support_face(p, cell.delta)[1] for p in polys]
        if _span_dim(faces) > ctx.k:
            raise NotGeneric(f"covector {tuple(gamma)} selects a face tuple of dimension > k")
        acc = vec_add(acc, ctx.u(mixed_moment(faces, ctx)))
    return acc


def contributing_faces(polys: Sequence[Polytope], ctx: ProjectionContext, gamma: Sequence):
    """Face tuples ``(Delta_i^delta)`` over the top cells selected by ``gamma``."""
    total = minkowski_sum_all(list(polys))
    out = []
    for cell in upper_cells(total, ctx, gamma):
        out.append((cell.delta, [support_face(p, cell.delta)[1] for p in polys]))
    return out


def mf_face(polys: Sequence[Polytope], ctx: ProjectionContext, gamma: Sequence) -> Polytope:
    """Face of MF in direction ``gamma`` (L-coordinates) as a sum over face tuples."""
    if not any(gamma):
        return mixed_fiber(polys, ctx)
    parts = []
    for _, faces in contributing_faces(polys, ctx, gamma):
        if faces == list(polys):
            return mixed_fiber(polys, ctx)
        parts.append(mixed_fiber_l(faces, ctx))
    if not parts:
        return point([0] * ctx.n)
    return ctx.from_l(minkowski_sum_all(parts))


@dataclass(frozen=True)
class SpanReport:
    is_point: bool
    subset: tuple[int, ...] | None
    span: Subspace


def span_of_composite(polys: Sequence[Polytope], ctx: ProjectionContext) -> SpanReport:
    """Predicted linear span of the composite body."""
    k = ctx.k
    pdims = {}
    for size in range(1, k + 2):
        for subset in combinations(range(k + 1), size):
            total = minkowski_sum_all([polys[i] for i in subset])
            pdims[subset] = convex_hull(ctx.p(v) for v in total.vertices).dim
    zero = Subspace(ctx.n, ())
    if any(d < len(s) - 1 for s, d in pdims.items()):
        return SpanReport(True, None, zero)
    tight = [s for s, d in pdims.items() if d == len(s) - 1]
    minimal = [s for s in tight if not any(set(t) < set(s) for t in tight)]
    if len(minimal) != 1:
        raise AssertionError(f"minimal tight subset is not unique: {minimal}")
    subset = minimal[0]
    total = minkowski_sum_all([polys[i] for i in subset])
    span = linear_span(total).intersect(ctx.L)
    return SpanReport(span.dim == 0, subset, span)


def segment_length_form(polys: Sequence[Polytope], ctx: ProjectionContext):
    """For polytopes parallel to a (k+1)-space K: the primitive direction of
    K ∩ L and the mixed volume w.r.t. dt ∧ p*mu."""
    k = ctx.k
    K = Subspace.span([vec_sub(v, p.vertices[0]) for p in polys for v in p.vertices[1:]], ctx.n)
    if K.dim != k + 1:
        raise PreconditionError("polytopes are not parallel to a (k+1)-dimensional subspace")
    line = K.intersect(ctx.L)
    if line.dim != 1:
        raise PreconditionError("K ∩ L is not a line")
    direction = line.basis[0]
    ld = ctx.lcoords(direction)
    norm2 = sum(x * x for x in ld)
    tau = [x / norm2 for x in ld]

    def chart(v):
        return (pairing(tau, ctx.lcoords(v)),) + ctx.p(v)

    charted = [convex_hull(chart(v) for v in p.vertices) for p in polys]
    return direction, tau, mixed_volume(charted)


def fits_after_shift(inner: Polytope, outer: Polytope) -> bool:
    """Whether some translate of ``inner`` lies inside ``outer`` (exact)."""
    n = inner.ambient_dim
    if inner.dim > outer.dim:
        return False
    eqs: list[tuple[list[Fraction], Fraction]] = []
    ineqs: list[tuple[list[Fraction], Fraction]] = []
    obase = outer.vertices[0]
    if outer.dim < n:
        diffs = [vec_sub(v, obase) for v in outer.vertices[1:]]
        normals = la.nullspace(diffs, n) if diffs else [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for eta in normals:
            vals = {pairing(eta, v) for v in inner.vertices}
            if len(vals) > 1:
                return False
            eqs.append((list(eta), pairing(eta, obase) - vals.pop()))
    for f in outer.facets:
        ineqs.append(([Fraction(x) for x in f.normal], f.value - inner.support(f.normal)))

    def feasible(s):
        return all(pairing(a, s) == b for a, b in eqs) and all(pairing(a, s) <= b for a, b in ineqs)

    free = n - la.rank([a for a, _ in eqs]) if eqs else n
    rows_eq = [a for a, _ in eqs]
    for chosen in combinations(range(len(ineqs)), free):
        rows = rows_eq + [ineqs[i][0] for i in chosen]
        if la.rank(rows) < n:
            continue
        rhs = [b for _, b in eqs] + [ineqs[i][1] for i in chosen]
        s = la.solve(rows, rhs)
        if s is not None and feasible(s):
            return True
    if free == 0:
        s = la.solve(rows_eq, [b for _, b in eqs])
        return s is not None and feasible(s)
    return False
