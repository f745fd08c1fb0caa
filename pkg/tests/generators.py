"""Seeded random instances shared by the unit, property and acceptance tests."""

from __future__ import annotations

import random
from fractions import Fraction

from newtonelim import _linalg as la
from newtonelim.elimination import is_developed
from newtonelim.laurent import GaussianRational, LaurentPoly, newton_polytope
from newtonelim.lattice_geom import LatticeMap, Polytope, convex_hull


def rng_for(tag: str, i: int) -> random.Random:
    return random.Random(f"{tag}:{i}")


def random_polytope(rng: random.Random, n: int, points: int = 4, box: int = 2) -> Polytope:
    return convex_hull([[rng.randint(0, box) for _ in range(n)] for _ in range(points)])


def random_full_polytope(rng: random.Random, n: int, points: int = 4, box: int = 2) -> Polytope:
    while True:
        p = random_polytope(rng, n, points, box)
        if p.dim == n:
            return p


def random_simplex(rng: random.Random, m: int, box: int = 2) -> Polytope:
    while True:
        pts = [[rng.randint(0, box) for _ in range(m)] for _ in range(m + 1)]
        s = convex_hull(pts)
        if s.dim == m and len(s.vertices) == m + 1:
            return s


def random_embedding(rng: random.Random, n: int, k: int) -> LatticeMap:
    """A random injective character embedding Z^{n-k} -> Z^n."""
    while True:
        rows = [[rng.randint(-1, 1) for _ in range(n - k)] for _ in range(n)]
        if la.rank(rows) == n - k:
            return LatticeMap.of(rows)


def random_coefficient(rng: random.Random, gaussian: bool = False) -> GaussianRational:
    while True:
        re = rng.randint(-9, 9)
        im = rng.randint(-9, 9) if gaussian else 0
        if re or im:
            return GaussianRational(Fraction(re), Fraction(im))


def random_laurent(rng: random.Random, support, gaussian: bool = False) -> LaurentPoly:
    support = [tuple(e) for e in support]
    n = len(support[0])
    return LaurentPoly.from_terms(n, [(e, random_coefficient(rng, gaussian)) for e in support])


def random_support(rng: random.Random, n: int, terms: int, box: int) -> list[tuple[int, ...]]:
    pts: set[tuple[int, ...]] = set()
    while len(pts) < terms:
        pts.add(tuple(rng.randint(0, box) for _ in range(n)))
    return sorted(pts)


def polynomial_with_polytope(rng: random.Random, poly: Polytope, gaussian: bool = False) -> LaurentPoly:
    """Random coefficients on the vertices of ``poly`` (so its Newton polytope is ``poly``)."""
    return random_laurent(rng, [tuple(int(x) for x in v) for v in poly.vertices], gaussian)


def developed_system(rng: random.Random, n: int, box: int = 2, terms: int = 3,
                     gaussian: bool = False) -> list[LaurentPoly]:
    """``n`` polynomials in ``n`` variables with developed, full-dimensional Newton polytopes."""
    while True:
        fs = [random_laurent(rng, random_support(rng, n, terms, box), gaussian) for _ in range(n)]
        As = [newton_polytope(f) for f in fs]
        total = As[0]
        for a in As[1:]:
            total = total + a
        if total.dim == n and is_developed(As):
            return fs


def binomial_system(rng: random.Random, n: int, box: int = 2, gaussian: bool = False):
    """Two-term polynomials with a nonsingular exponent-difference matrix."""
    while True:
        rows = [[rng.randint(-box, box) for _ in range(n)] for _ in range(n)]
        if la.int_det(rows) != 0:
            break
    fs = []
    for r in rows:
        low = [min(0, x) for x in r]
        p = tuple(x - y for x, y in zip(r, low))
        q = tuple(-y for y in low)
        fs.append(LaurentPoly.from_terms(n, [(p, random_coefficient(rng, gaussian)),
                                             (q, random_coefficient(rng, gaussian))]))
    return fs, rows
