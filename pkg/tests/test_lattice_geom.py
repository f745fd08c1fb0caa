from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from newtonelim.errors import DimensionMismatch, PreconditionError
from newtonelim.lattice_geom import (
    LatticeMap,
    Subspace,
    VirtualPolytope,
    as_rational,
    convex_hull,
    is_compatible,
    lattice_points,
    linear_span,
    map_polytope,
    minkowski_sum,
    point,
    support_face,
)

SQUARE = convex_hull([(0, 0), (1, 0), (0, 1), (1, 1)])
TRIANGLE = convex_hull([(0, 0), (1, 0), (0, 1)])
E1 = convex_hull([(0, 0), (1, 0)])
E2 = convex_hull([(0, 0), (0, 1)])

small_int = st.integers(-3, 3)


def points(dim, min_size=1, max_size=6):
    return st.lists(st.tuples(*[small_int] * dim), min_size=min_size, max_size=max_size)


covectors = st.tuples(small_int, small_int)


# --- convex hull -----------------------------------------------------------

def test_hull_drops_interior_point():
    p = convex_hull([(0, 0), (1, 0), (0, 1), (1, 1), (Fraction(1, 2), Fraction(1, 2))])
    assert p == SQUARE
    assert len(p.vertices) == 4


def test_hull_of_single_point():
    p = convex_hull([(3, 7)])
    assert p.dim == 0
    assert p.vertices == ((3, 7),)


def test_hull_of_collinear_points_is_segment():
    p = convex_hull([(0, 0), (1, 1), (2, 2)])
    assert p.vertices == ((0, 0), (2, 2))
    assert p.dim == 1


def test_hull_rejects_empty_input():
    with pytest.raises(PreconditionError):
        convex_hull([])


def test_rational_parsing():
    assert as_rational("3/6") == Fraction(1, 2)
    assert as_rational(-4) == Fraction(-4)
    with pytest.raises(TypeError):
        as_rational(0.5)


def test_square_face_lattice():
    assert SQUARE.dim == 2
    assert len(SQUARE.facets) == 4
    assert len(SQUARE.faces_of_dim(1)) == 4
    assert len(SQUARE.faces_of_dim(0)) == 4


def test_contains():
    assert SQUARE.contains((Fraction(1, 2), 1))
    assert not SQUARE.contains((2, 0))
    assert E1.contains((Fraction(1, 3), 0))
    assert not E1.contains((Fraction(1, 3), Fraction(1, 3)))


# --- Minkowski sums --------------------------------------------------------

def test_sum_of_unit_segments_is_square():
    assert minkowski_sum(E1, E2) == SQUARE


def test_sum_with_point_translates():
    assert SQUARE + point((2, -1)) == SQUARE.translate((2, -1))


def test_simplex_plus_simplex_is_dilate():
    assert TRIANGLE + TRIANGLE == TRIANGLE.scale(2)


def test_sum_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        minkowski_sum(SQUARE, point((0, 0, 0)))


# --- support faces ---------------------------------------------------------

def test_support_face_edge():
    value, face = support_face(SQUARE, (1, 0))
    assert value == 1
    assert face == convex_hull([(1, 0), (1, 1)])


def test_support_face_vertex():
    value, face = support_face(SQUARE, (1, 1))
    assert value == 2
    assert face == point((1, 1))


def test_zero_covector_selects_everything():
    value, face = support_face(TRIANGLE, (0, 0))
    assert value == 0
    assert face == TRIANGLE


# --- virtual polytopes -----------------------------------------------------

def test_virtual_zero_representatives_agree():
    assert VirtualPolytope(SQUARE, SQUARE) == VirtualPolytope(TRIANGLE, TRIANGLE)


def test_virtual_support_difference():
    v = VirtualPolytope(SQUARE, point((1, 1)))
    assert v.support((1, 1)) == 0


def test_virtual_cancellation_example():
    assert VirtualPolytope(SQUARE + E1, TRIANGLE + E1) == VirtualPolytope(SQUARE, TRIANGLE)


def test_virtual_properness():
    assert VirtualPolytope(SQUARE, E1).is_proper()
    assert VirtualPolytope(SQUARE, E1).as_polytope() == E2
    assert not VirtualPolytope(E1, E2).is_proper()
    assert not VirtualPolytope(point((0, 0)), SQUARE).is_proper()


def test_virtual_negative_scale_flips():
    v = VirtualPolytope.proper(SQUARE)
    assert v.scale(-2) == -(v.scale(2))


# --- spans, maps, compatibility --------------------------------------------

def test_linear_spans():
    assert linear_span(point((1, 2))).dim == 0
    assert linear_span(convex_hull([(0, 0), (2, 0)])) == Subspace.span([(1, 0)], 2)
    assert linear_span(SQUARE).dim == 2


def test_span_is_saturated():
    sub = Subspace.span([(2, 4)], 2)
    assert sub.basis in (((1, 2),), ((-1, -2),))


def test_subspace_intersection():
    plane = Subspace.span([(1, 0, 0), (0, 1, 0)], 3)
    other = Subspace.span([(1, 1, 1), (0, 0, 1)], 3)
    assert plane.intersect(other) == Subspace.span([(1, 1, 0)], 3)


def test_map_polytope_examples():
    x_only = LatticeMap.of([[1, 0]])
    assert map_polytope(SQUARE, x_only) == convex_hull([(0,), (1,)])
    identity = LatticeMap.of([[1, 0], [0, 1]])
    assert map_polytope(TRIANGLE, identity) == TRIANGLE
    assert map_polytope(point((2, 3)), LatticeMap.of([[1, 1], [0, 2]])) == point((5, 6))


def test_map_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        map_polytope(SQUARE, LatticeMap.of([[1, 0, 0]]))


def test_compatibility_examples():
    assert is_compatible(TRIANGLE, TRIANGLE)
    assert is_compatible(TRIANGLE, point((4, 4)))
    assert not is_compatible(E1, E2)


def test_lattice_points_of_triangle():
    assert sorted(lattice_points(TRIANGLE.scale(2))) == sorted(
        [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (0, 2)])


# --- properties ------------------------------------------------------------

@given(points(2))
def test_hull_idempotent(pts):
    p = convex_hull(pts)
    assert convex_hull(p.vertices) == p


@given(points(3))
def test_hull_contains_inputs(pts):
    p = convex_hull(pts)
    assert all(p.contains(q) for q in pts)


@given(points(2), points(2), points(2))
def test_sum_commutative_associative(a, b, c):
    p, q, r = convex_hull(a), convex_hull(b), convex_hull(c)
    assert p + q == q + p
    assert (p + q) + r == p + (q + r)


@given(points(2), points(2), covectors)
def test_support_additive(a, b, gamma):
    p, q = convex_hull(a), convex_hull(b)
    assert (p + q).support(gamma) == p.support(gamma) + q.support(gamma)


@given(points(3), st.tuples(small_int, small_int, small_int))
def test_support_face_vertices_attain_value(pts, gamma):
    p = convex_hull(pts)
    value, face = support_face(p, gamma)
    assert all(sum(g * x for g, x in zip(gamma, v)) == value for v in face.vertices)


@given(points(2), points(2), points(2))
def test_virtual_cancellation(a, b, r):
    pa, pb, pr = convex_hull(a), convex_hull(b), convex_hull(r)
    assert VirtualPolytope(pa + pr, pb + pr) == VirtualPolytope(pa, pb)


@given(points(3), points(3))
def test_span_of_sum(a, b):
    p, q = convex_hull(a), convex_hull(b)
    assert linear_span(p + q) == linear_span(p) + linear_span(q)
