"""Laurent polynomials with exact Gaussian-rational coefficients.

Besides arithmetic this module provides the Newton-polytope side of the
library: truncations to faces, restrictions to point sets, vertex and edge
coefficients, the binomial substitution ``x_j -> t^b_j + t^-a_j`` and the
lattice square used when dehomogenizing a projection.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from . import _linalg as la
from .errors import DegenerateConfiguration, DimensionMismatch, PreconditionError
from .lattice_geom import (
    LatticeMap,
    Polytope,
    Subspace,
    as_rational,
    complete_basis,
    convex_hull,
    face_normal,
    minkowski_sum_all,
    pairing,
    vec_sub,
)

Exponent = tuple[int, ...]


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianRational:
    """An element ``re + im*i`` of Q(i)."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def of(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex numbers are not exact coefficients")
        if isinstance(x, str):
            return cls.parse(x)
        return cls(as_rational(x), Fraction(0))

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        """Parse ``"p/q"``, ``"a/b+c/di"``, ``"-3i"``, ``"i"`` and similar."""
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty coefficient string")
        if not s.endswith("i"):
            return cls(Fraction(s), 0)
        body = s[:-1]
        # split at the last sign that is not the leading one
        cut = max(body.rfind("+", 1), body.rfind("-", 1))
        if cut > 0 and body[cut - 1] not in "/":
            real_part, imag_part = body[:cut], body[cut:]
        else:
            real_part, imag_part = "", body
        if imag_part in ("", "+"):
            imag = Fraction(1)
        elif imag_part == "-":
            imag = Fraction(-1)
        else:
            imag = Fraction(imag_part)
        return cls(Fraction(real_part) if real_part else Fraction(0), imag)

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    def __repr__(self) -> str:
        return f"GaussianRational({self})"

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __add__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussianRational":
        nrm = self.norm()
        if nrm == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(self.re / nrm, -self.im / nrm)

    def __truediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            raise TypeError("only integer powers are exact")
        if e < 0:
            return self.inverse() ** (-e)
        result, base = ONE, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))


def _coerce(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(Fraction(x), Fraction(0))
    return NotImplemented


ZERO = GaussianRational(0, 0)
ONE = GaussianRational(1, 0)
I_UNIT = GaussianRational(0, 1)


# ---------------------------------------------------------------------------
# Laurent polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentPoly:
    """Finite sum of monomials ``c * x^e`` with ``c`` in Q(i), ``e`` in Z^n."""

    nvars: int
    items: tuple[tuple[Exponent, GaussianRational], ...]

    @classmethod
    def from_terms(cls, nvars: int, terms: Mapping | Iterable) -> "LaurentPoly":
        acc: dict[Exponent, GaussianRational] = {}
        pairs = terms.items() if isinstance(terms, Mapping) else terms
        for exp, coeff in pairs:
            exp = tuple(int(x) for x in exp)
            if len(exp) != nvars:
                raise DimensionMismatch(f"exponent {exp} has length != {nvars}")
            acc[exp] = acc.get(exp, ZERO) + GaussianRational.of(coeff)
        return cls(nvars, tuple(sorted((e, c) for e, c in acc.items() if c)))

    @classmethod
    def zero(cls, nvars: int) -> "LaurentPoly":
        return cls(nvars, ())

    @classmethod
    def constant(cls, nvars: int, c) -> "LaurentPoly":
        return cls.from_terms(nvars, [((0,) * nvars, c)])

    @classmethod
    def monomial(cls, exp: Sequence[int], c=1) -> "LaurentPoly":
        return cls.from_terms(len(exp), [(tuple(exp), c)])

    @classmethod
    def variable(cls, nvars: int, i: int) -> "LaurentPoly":
        return cls.monomial(tuple(int(j == i) for j in range(nvars)))

    @cached_property
    def terms(self) -> dict[Exponent, GaussianRational]:
        return dict(self.items)

    @property
    def support(self) -> list[Exponent]:
        return [e for e, _ in self.items]

    def is_zero(self) -> bool:
        return not self.items

    def is_monomial(self) -> bool:
        return len(self.items) == 1

    def coefficient(self, exp: Sequence[int]) -> GaussianRational:
        return self.terms.get(tuple(int(x) for x in exp), ZERO)

    def _check(self, other: "LaurentPoly"):
        if self.nvars != other.nvars:
            raise DimensionMismatch("polynomials in different numbers of variables")

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(self.nvars, other)
        self._check(other)
        return LaurentPoly.from_terms(self.nvars, list(self.items) + list(other.items))

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.nvars, tuple((e, -c) for e, c in self.items))

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            c = GaussianRational.of(other)
            return LaurentPoly.from_terms(self.nvars, [(e, c * v) for e, v in self.items])
        self._check(other)
        acc: dict[Exponent, GaussianRational] = {}
        for e1, c1 in self.items:
            for e2, c2 in other.items:
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, ZERO) + c1 * c2
        return LaurentPoly.from_terms(self.nvars, acc)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            if not self.is_monomial():
                raise PreconditionError("only monomials have Laurent inverses")
            (exp, c), = self.items
            return LaurentPoly.monomial(tuple(-x for x in exp), c.inverse()) ** (-e)
        result = LaurentPoly.constant(self.nvars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def shift(self, exp: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial ``x^exp``."""
        return LaurentPoly.from_terms(self.nvars, [(tuple(a + b for a, b in zip(e, exp)), c)
                                                   for e, c in self.items])

    def map_exponents(self, m: LatticeMap) -> "LaurentPoly":
        """Monomial change of variables acting on exponents by ``m``."""
        return LaurentPoly.from_terms(m.target_dim, [(tuple(int(x) for x in m(e)), c) for e, c in self.items])

    def derivative(self, i: int) -> "LaurentPoly":
        return LaurentPoly.from_terms(self.nvars, [
            (tuple(x - (j == i) for j, x in enumerate(e)), c * e[i]) for e, c in self.items])

    def log_derivative(self, i: int) -> "LaurentPoly":
        """``x_i * d/dx_i``."""
        return LaurentPoly.from_terms(self.nvars, [(e, c * e[i]) for e, c in self.items])

    def evaluate(self, point: Sequence[complex]) -> complex:
        total = 0j
        for e, c in self.items:
            term = complex(c)
            for z, k in zip(point, e):
                term *= z ** k
            total += term
        return total

    def evaluate_exact(self, point: Sequence) -> GaussianRational:
        total = ZERO
        pts = [GaussianRational.of(z) for z in point]
        for e, c in self.items:
            term = c
            for z, k in zip(pts, e):
                term = term * z ** k
            total = total + term
        return total

    def __str__(self) -> str:
        if not self.items:
            return "0"
        parts = []
        for e, c in self.items:
            mono = "*".join(f"x{i + 1}^{k}" if k != 1 else f"x{i + 1}" for i, k in enumerate(e) if k)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def to_json(self) -> list:
        return [[list(e), str(c)] for e, c in self.items]

    @classmethod
    def from_json(cls, data: Sequence, nvars: int | None = None) -> "LaurentPoly":
        if not data:
            if nvars is None:
                raise PreconditionError("cannot infer the number of variables of an empty term list")
            return cls.zero(nvars)
        n = len(data[0][0]) if nvars is None else nvars
        return cls.from_terms(n, [(tuple(e), GaussianRational.of(c)) for e, c in data])


# ---------------------------------------------------------------------------
# Newton data
# ---------------------------------------------------------------------------

def newton_polytope(f: LaurentPoly) -> Polytope:
    if f.is_zero():
        raise PreconditionError("the zero polynomial has no Newton polytope")
    return convex_hull(f.support)


def truncation(f: LaurentPoly, gamma: Sequence) -> LaurentPoly:
    """Terms of ``f`` on the face of its Newton polytope maximizing ``gamma``."""
    if f.is_zero():
        raise PreconditionError("truncation of the zero polynomial")
    if len(gamma) != f.nvars:
        raise DimensionMismatch("covector length differs from the number of variables")
    vals = {e: pairing(gamma, e) for e in f.support}
    top = max(vals.values())
    return LaurentPoly(f.nvars, tuple((e, c) for e, c in f.items if vals[e] == top))


def restrict(f: LaurentPoly, points: Iterable[Sequence[int]]) -> LaurentPoly:
    keep = {tuple(int(x) for x in p) for p in points}
    return LaurentPoly(f.nvars, tuple((e, c) for e, c in f.items if e in keep))


@dataclass(frozen=True)
class VertexEdgeData:
    vertices: dict[Exponent, GaussianRational]
    edge_points: dict[Exponent, GaussianRational]


def _segment_lattice_points(a: Sequence, b: Sequence) -> list[Exponent]:
    from math import gcd
    d = [int(y - x) for x, y in zip(a, b)]
    g = 0
    for x in d:
        g = gcd(g, x)
    if g == 0:
        return [tuple(int(x) for x in a)]
    step = [x // g for x in d]
    return [tuple(int(a[i]) + j * step[i] for i in range(len(a))) for j in range(g + 1)]


def vertex_and_edge_coefficients(f: LaurentPoly) -> VertexEdgeData:
    """Coefficients at Newton-polytope vertices and at lattice points of edges."""
    poly = newton_polytope(f)
    verts = {tuple(int(x) for x in v): f.coefficient(v) for v in poly.vertices}
    edges: dict[Exponent, GaussianRational] = {}
    if poly.dim >= 1:
        for face in poly.faces_of_dim(1):
            a, b = (poly.vertices[i] for i in sorted(face))
            for q in _segment_lattice_points(a, b):
                if q not in verts:
                    edges[q] = f.coefficient(q)
    return VertexEdgeData(verts, edges)


def substitute_binomials(f: LaurentPoly, k: int, gamma1: Sequence[int], gamma2: Sequence[int]) -> LaurentPoly:
    """``f(u, t^gamma2 + t^-gamma1)`` as a Laurent polynomial in ``(u_1..u_k, t)``.

    The first ``k`` variables of ``f`` are kept, the last ``n - k`` are
    replaced by binomials in the new variable ``t``.
    """
    m = f.nvars - k
    if len(gamma1) != m or len(gamma2) != m:
        raise DimensionMismatch(f"covectors must have length {m}")
    if any(int(g) <= 0 for g in list(gamma1) + list(gamma2)):
        raise PreconditionError("binomial substitution needs strictly positive covectors")
    if any(e[k + j] < 0 for e in f.support for j in range(m)):
        raise PreconditionError("substituted variables must appear with non-negative exponents")
    nv = k + 1
    tvec = [0] * k
    binoms = [LaurentPoly.from_terms(nv, [(tuple(tvec + [int(gamma2[j])]), 1),
                                          (tuple(tvec + [-int(gamma1[j])]), 1)]) for j in range(m)]
    cache: dict[tuple[int, int], LaurentPoly] = {}

    def power(j: int, e: int) -> LaurentPoly:
        if (j, e) not in cache:
            cache[(j, e)] = binoms[j] ** e
        return cache[(j, e)]

    total = LaurentPoly.zero(nv)
    for e, c in f.items:
        term = LaurentPoly.monomial(tuple(e[:k]) + (0,), c)
        for j in range(m):
            if e[k + j]:
                term = term * power(j, e[k + j])
        total = total + term
    return total


# ---------------------------------------------------------------------------
# dehomogenization square
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusMapData:
    """Commutative square ``pi_x @ h_prime == h_x @ pi_prime`` of lattice maps.

    ``h_prime``: Z^{n'-k} -> Z^{n-k}; ``pi_prime``: Z^{n'-k} -> Z^{n'}.  Their
    common image in Z^n is the intersection of the images of ``pi_x`` and
    ``h_x``.  ``q`` is the order of the torsion of Z^n modulo the sum of
    the two images; ``full_rank`` says whether that sum has finite index.
    """

    pi_x: LatticeMap
    h_x: LatticeMap
    pi_prime: LatticeMap
    h_prime: LatticeMap
    q: int
    full_rank: bool


def dehomogenization_data(pi_x: LatticeMap, h_x: LatticeMap) -> TorusMapData:
    if pi_x.rank() != pi_x.source_dim or h_x.rank() != h_x.source_dim:
        raise PreconditionError("both lattice maps must be injective")
    n = pi_x.target_dim
    if h_x.target_dim != n:
        raise DimensionMismatch("maps must share the target lattice")
    a, b = pi_x.source_dim, h_x.source_dim
    joint = [list(pi_x.matrix[i]) + [-x for x in h_x.matrix[i]] for i in range(n)]
    _, d, v = la.smith_normal_form(joint)
    r = sum(1 for i in range(min(n, a + b)) if d[i][i])
    kernel_cols = [[v[row][c] for row in range(a + b)] for c in range(r, a + b)]
    h_prime = LatticeMap.of([[col[i] for col in kernel_cols] for i in range(a)]) if kernel_cols else \
        LatticeMap.of([[] for _ in range(a)])
    pi_prime = LatticeMap.of([[col[a + i] for col in kernel_cols] for i in range(b)]) if kernel_cols else \
        LatticeMap.of([[] for _ in range(b)])
    _, d2, _ = la.smith_normal_form([list(pi_x.matrix[i]) + list(h_x.matrix[i]) for i in range(n)])
    q = 1
    rank = 0
    for i in range(min(n, a + b)):
        if d2[i][i]:
            q *= d2[i][i]
            rank += 1
    return TorusMapData(pi_x, h_x, pi_prime, h_prime, q, rank == n)


# ---------------------------------------------------------------------------
# univariate exact gcd (for face systems in one essential variable)
# ---------------------------------------------------------------------------

def _trim(p: list[GaussianRational]) -> list[GaussianRational]:
    while p and not p[-1]:
        p.pop()
    return p


def _poly_mod(a: list[GaussianRational], b: list[GaussianRational]) -> list[GaussianRational]:
    a = list(a)
    while len(a) >= len(b) and a:
        factor = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = a[shift + i] - factor * c
        _trim(a)
    return a


def univariate_gcd(polys: Sequence[list[GaussianRational]]) -> list[GaussianRational]:
    """Monic gcd of dense coefficient lists (constant term first)."""
    g: list[GaussianRational] = []
    for p in polys:
        p = _trim(list(p))
        while p:
            g, p = p, _poly_mod(g, p) if g else []
        if not g:
            g = p
    if not g:
        return []
    lead = g[-1]
    return [c / lead for c in g]


def _dense_univariate(f: LaurentPoly) -> list[GaussianRational]:
    """Coefficient list of a one-variable Laurent polynomial with the
    monomial factor cleared (constant term first)."""
    low = min(e[0] for e in f.support)
    high = max(e[0] for e in f.support)
    coeffs = [ZERO] * (high - low + 1)
    for e, c in f.items:
        coeffs[e[0] - low] = c
    return coeffs


# ---------------------------------------------------------------------------
# Newton nondegeneracy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Verified:
    checked_faces: int


@dataclass(frozen=True)
class Refuted:
    normal: tuple[Fraction, ...]
    faces: tuple[LaurentPoly, ...]


@dataclass(frozen=True)
class Unknown:
    reason: str


def reduce_face_system(fs: Sequence[LaurentPoly]) -> tuple[list[LaurentPoly], int]:
    """Rewrite quasi-homogeneous polynomials in coordinates of their joint
    direction lattice; returns the rewritten polynomials and its rank."""
    n = fs[0].nvars
    diffs = []
    for f in fs:
        base = f.support[0]
        diffs += [vec_sub(e, base) for e in f.support[1:]]
    sub = Subspace.span(diffs, n) if diffs and any(any(x for x in d) for d in diffs) else Subspace(n, ())
    d = sub.dim
    if d == 0:
        return [LaurentPoly.constant(0, f.items[0][1]) for f in fs], 0
    frame = complete_basis(sub)
    coframe = la.integer_inverse(frame)
    out = []
    for f in fs:
        base = f.support[0]
        terms = []
        for e, c in f.items:
            diff = vec_sub(e, base)
            coords = [int(sum(diff[i] * coframe[i][j] for i in range(n))) for j in range(d)]
            terms.append((tuple(coords), c))
        out.append(LaurentPoly.from_terms(d, terms))
    return out, d


def _face_tuples(fs: Sequence[LaurentPoly], max_dim: int):
    polys = [newton_polytope(f) for f in fs]
    total = minkowski_sum_all(polys)
    for face, dim in sorted(total.faces.items(), key=lambda kv: (kv[1], sorted(kv[0]))):
        if dim > max_dim:
            continue
        gamma = face_normal(total, face)
        yield gamma, [truncation(f, gamma) for f in fs]


def nondegeneracy_check(fs: Sequence[LaurentPoly], tolerance: float = 1e-8):
    """Decide Newton nondegeneracy of ``k+1`` polynomials face by face.

    Face systems in at most one essential variable are decided exactly (gcd
    over Q(i)); two essential variables go through the bivariate oracle;
    anything larger is reported as :class:`Unknown`.
    """
    from . import oracle

    k = len(fs) - 1
    unknown = None
    count = 0
    for gamma, faces in _face_tuples(fs, k):
        count += 1
        if any(f.is_monomial() for f in faces):
            continue
        reduced, d = reduce_face_system(faces)
        if d == 1:
            g = univariate_gcd([_dense_univariate(f) for f in reduced])
            if len(g) > 1:
                return Refuted(tuple(gamma), tuple(faces))
        elif d == 2:
            decided = False
            for i, j in combinations(range(len(reduced)), 2):
                try:
                    sample = oracle.bivariate_solve(reduced[i], reduced[j])
                except Exception:
                    continue
                decided = True
                others = [reduced[m] for m in range(len(reduced)) if m not in (i, j)]
                for z, _ in sample.points:
                    if all(oracle.relative_residual(h, z) <= tolerance for h in others):
                        return Refuted(tuple(gamma), tuple(faces))
                break
            if not decided:
                unknown = unknown or f"could not solve the face system at {tuple(map(str, gamma))}"
        else:
            unknown = unknown or f"face system with {d} essential variables"
    if unknown:
        return Unknown(unknown)
    return Verified(count)
