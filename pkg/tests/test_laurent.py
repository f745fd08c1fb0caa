from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from newtonelim.errors import DimensionMismatch, PreconditionError
from newtonelim.laurent import (
    GaussianRational,
    LaurentPoly,
    Refuted,
    Unknown,
    Verified,
    dehomogenization_data,
    newton_polytope,
    nondegeneracy_check,
    restrict,
    substitute_binomials,
    truncation,
    vertex_and_edge_coefficients,
)
from newtonelim.lattice_geom import (
    LatticeMap,
    VirtualPolytope,
    convex_hull,
    map_polytope,
    point,
    support_face,
)

X = LaurentPoly.variable(2, 0)
Y = LaurentPoly.variable(2, 1)
ONE = LaurentPoly.constant(2, 1)
LINE = ONE + X + Y
T = LaurentPoly.variable(1, 0)


# --- coefficients ----------------------------------------------------------

def test_gaussian_parsing_and_arithmetic():
    z = GaussianRational.parse("1/2-3i")
    assert (z.re, z.im) == (Fraction(1, 2), Fraction(-3))
    assert GaussianRational.parse("i") * GaussianRational.parse("i") == GaussianRational(-1)
    assert z * z.inverse() == GaussianRational(1)
    assert str(GaussianRational.parse("-2/4")) == "-1/2"


def test_float_coefficients_rejected():
    with pytest.raises(TypeError):
        GaussianRational.of(1.5j)


# --- Newton polytopes ------------------------------------------------------

def test_newton_polytope_examples():
    assert newton_polytope(LINE) == convex_hull([(0, 0), (1, 0), (0, 1)])
    assert newton_polytope(X * Y * 5) == point((1, 1))
    f = LaurentPoly.from_terms(2, [((0, 0), 3), ((2, -1), 1)])
    assert newton_polytope(f) == convex_hull([(0, 0), (2, -1)])


def test_zero_has_no_newton_polytope():
    with pytest.raises(PreconditionError):
        newton_polytope(LaurentPoly.zero(2))


def test_cancellation_removes_terms():
    assert (X + Y - X).support == [(0, 1)]


# --- truncations and restrictions ------------------------------------------

def test_truncation_examples():
    assert truncation(LINE, (1, 0)) == X
    assert truncation(LINE, (0, 0)) == LINE
    assert truncation(LINE, (1, 1)) == X + Y


def test_restriction_examples():
    assert restrict(LINE, [(0, 0), (1, 0), (0, 1), (5, 5)]) == LINE
    assert restrict(LINE, []).is_zero
    assert restrict(LINE, [(1, 0)]) == X


def test_vertex_and_edge_coefficients():
    f = LaurentPoly.from_terms(1, [((0,), 5), ((2,), 7)])
    data = vertex_and_edge_coefficients(f)
    assert data.vertices == {(0,): GaussianRational(5), (2,): GaussianRational(7)}
    assert data.edge_points == {(1,): GaussianRational(0)}
    assert set(vertex_and_edge_coefficients(LINE).vertices) == {(0, 0), (1, 0), (0, 1)}
    assert list(vertex_and_edge_coefficients(X * 4).vertices) == [(1, 0)]


# --- binomial substitution -------------------------------------------------

def test_substitute_examples():
    assert substitute_binomials(T, 0, (1,), (1,)) == T + T ** -1
    assert substitute_binomials(T ** 2, 0, (1,), (2,)) == T ** 4 + T * 2 + T ** -2
    u, t = LaurentPoly.variable(2, 0), LaurentPoly.variable(2, 1)
    assert substitute_binomials(X * Y, 1, (2,), (3,)) == u * t ** 3 + u * t ** -2


def test_substitute_preconditions():
    with pytest.raises(PreconditionError):
        substitute_binomials(T, 0, (0,), (1,))
    with pytest.raises(DimensionMismatch):
        substitute_binomials(T, 0, (1, 1), (1, 1))


# --- dehomogenization square -----------------------------------------------

def test_dehomogenization_index():
    assert dehomogenization_data(LatticeMap.of([[1], [0]]), LatticeMap.of([[0], [1]])).q == 1
    assert dehomogenization_data(LatticeMap.of([[2], [0]]), LatticeMap.of([[0], [1]])).q == 2


def test_dehomogenization_square_commutes():
    pi_x = LatticeMap.of([[1, 0], [1, 2], [0, 1]])
    h_x = LatticeMap.of([[1, 0], [0, 1], [1, 1]])
    data = dehomogenization_data(pi_x, h_x)
    for col in range(data.h_prime.source_dim):
        e = [int(i == col) for i in range(data.h_prime.source_dim)]
        assert pi_x(data.h_prime(e)) == h_x(data.pi_prime(e))


def test_dehomogenization_with_full_lattice():
    data = dehomogenization_data(LatticeMap.of([[2], [0]]), LatticeMap.of([[1, 0], [0, 1]]))
    assert data.q == 1 and data.full_rank
    assert data.pi_prime == LatticeMap.of([[2], [0]])


def test_dehomogenization_needs_injective_maps():
    with pytest.raises(PreconditionError):
        dehomogenization_data(LatticeMap.of([[1, 2], [2, 4]]), LatticeMap.of([[1], [0]]))


# --- nondegeneracy ---------------------------------------------------------

def test_identical_lines_are_degenerate():
    assert isinstance(nondegeneracy_check([LINE, LINE]), Refuted)


def test_generic_lines_are_nondegenerate():
    assert isinstance(nondegeneracy_check([LINE, ONE + X * 2 + Y * 3]), Verified)


def test_three_variables_verdict_is_admissible():
    x, y, z = (LaurentPoly.variable(3, i) for i in range(3))
    one = LaurentPoly.constant(3, 1)
    verdict = nondegeneracy_check([x + y + z + x * y * z + one, x * x + y * z * 3 + z + one * 2])
    assert isinstance(verdict, (Verified, Unknown))


# --- properties ------------------------------------------------------------

coefficient = st.integers(-5, 5).filter(bool)
exponent = st.tuples(st.integers(-2, 2), st.integers(-2, 2))
polynomial = st.dictionaries(exponent, coefficient, min_size=1, max_size=5).map(
    lambda d: LaurentPoly.from_terms(2, list(d.items())))
covector = st.tuples(st.integers(-3, 3), st.integers(-3, 3))


@given(polynomial, covector)
def test_truncation_idempotent(f, gamma):
    once = truncation(f, gamma)
    assert truncation(once, gamma) == once
    assert newton_polytope(once) == support_face(newton_polytope(f), gamma)[1]


@given(polynomial, polynomial)
def test_newton_polytope_of_product(f, g):
    assert newton_polytope(f * g) == newton_polytope(f) + newton_polytope(g)


@given(polynomial, polynomial)
def test_rational_function_vertices(f, g):
    """Newton data of f/g: the virtual polytope N(f) - N(g) and vertex ratios."""
    virtual = VirtualPolytope(newton_polytope(f), newton_polytope(g))
    assert virtual + VirtualPolytope.proper(newton_polytope(g)) == VirtualPolytope.proper(newton_polytope(f))
    for gamma in ((1, 0), (0, 1), (-1, 2), (2, -3)):
        a = truncation(f, gamma)
        b = truncation(g, gamma)
        if a.is_monomial and b.is_monomial:
            product = truncation(f * g, gamma)
            assert product.items[0][1] == a.items[0][1] * b.items[0][1]


@given(st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2)), coefficient, min_size=1, max_size=5),
       st.integers(1, 3), st.integers(1, 3))
def test_substitution_stays_in_predicted_polytope(terms, g1, g2):
    f = LaurentPoly.from_terms(2, list(terms.items()))
    result = substitute_binomials(f, 1, (g1,), (g2,))
    if result.is_zero:
        return
    # exponent (u, x) spreads over the segment (u, -g1*x) -- (u, g2*x)
    lifted = convex_hull([(e[0], -g1 * e[1]) for e in f.support] + [(e[0], g2 * e[1]) for e in f.support])
    assert all(lifted.contains(e) for e in result.support)


def test_map_exponents_matches_polytope_map():
    m = LatticeMap.of([[1, 1], [0, 2]])
    assert newton_polytope(LINE.map_exponents(m)) == map_polytope(newton_polytope(LINE), m)
