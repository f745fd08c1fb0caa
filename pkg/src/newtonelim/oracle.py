"""Brute-force ground truth for small sparse systems.

Univariate polynomials are solved by companion-matrix eigenvalues with
multiplicities taken from an exact square-free decomposition; systems of
binomials are solved through the Smith normal form of the exponent matrix
(with an exact product-over-roots formula); bivariate systems go through a
resultant after a random shear.  Everything numeric here is used only as a
reference for the exact formulas elsewhere in the library.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Sequence

import numpy as np

from . import _linalg as la
from .errors import OracleFailure, PreconditionError
from .laurent import ONE, ZERO, GaussianRational, LaurentPoly, _trim, univariate_gcd

ROOT_CLUSTER_RTOL = 1e-9
COMPARE_RTOL = 1e-8
RESIDUAL_LIMIT = 1e-6


@dataclass(frozen=True)
class RootSample:
    """Common torus roots with multiplicities."""

    points: tuple[tuple[tuple[complex, ...], int], ...]
    tolerance: float = ROOT_CLUSTER_RTOL
    exact_product: object = field(default=None, compare=False)


def relative_residual(f: LaurentPoly, z: Sequence[complex]) -> float:
    """``|f(z)|`` relative to the sum of the absolute values of its terms."""
    total = 0j
    scale = 0.0
    for e, c in f.items:
        term = complex(c)
        for w, k in zip(z, e):
            term *= w ** k
        total += term
        scale += abs(term)
    return abs(total) / scale if scale else abs(total)


def close(a: complex, b: complex, rtol: float = COMPARE_RTOL) -> bool:
    return abs(a - b) <= rtol * max(1.0, abs(a), abs(b))


# ---------------------------------------------------------------------------
# univariate
# ---------------------------------------------------------------------------

def _poly_div(a: list[GaussianRational], b: list[GaussianRational]) -> list[GaussianRational]:
    """Exact quotient of dense coefficient lists (constant term first)."""
    a = list(a)
    q = [ZERO] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        factor = a[-1] / b[-1]
        shift = len(a) - len(b)
        q[shift] = factor
        for i, c in enumerate(b):
            a[shift + i] = a[shift + i] - factor * c
        _trim(a)
    return _trim(q)


def _derivative(a: list[GaussianRational]) -> list[GaussianRational]:
    return _trim([a[i] * i for i in range(1, len(a))])


def square_free_decomposition(a: list[GaussianRational]) -> list[tuple[list[GaussianRational], int]]:
    """Yun's algorithm over Q(i): pairs (square-free factor, multiplicity)."""
    a = _trim(list(a))
    out = []
    b = univariate_gcd([a, _derivative(a)])
    c = _poly_div(a, b)
    d = _trim([x - y for x, y in _zip_longest(_poly_div(_derivative(a), b), _derivative(c))])
    i = 1
    while len(c) > 1:
        g = univariate_gcd([c, d]) if d else c
        if len(g) > 1:
            out.append((g, i))
        c = _poly_div(c, g)
        d = _trim([x - y for x, y in _zip_longest(_poly_div(d, g), _derivative(c))]) if d else []
        i += 1
    return out


def _zip_longest(a, b):
    n = max(len(a), len(b))
    a = list(a) + [ZERO] * (n - len(a))
    b = list(b) + [ZERO] * (n - len(b))
    return zip(a, b)


def _polish(coeffs: np.ndarray, z: complex, steps: int = 4) -> complex:
    """Newton steps on a dense polynomial (highest degree first)."""
    deriv = np.polyder(coeffs)
    for _ in range(steps):
        d = np.polyval(deriv, z)
        if d == 0:
            break
        step = np.polyval(coeffs, z) / d
        z = z - step
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    return complex(z)


_MP_LADDER = ((40, 200), (80, 800), (160, 3000))


def _mp_roots(coeffs: Sequence, degree_hint: int) -> list:
    """Extended-precision roots, highest degree first.

    ``coeffs`` may hold exact :class:`GaussianRational` values; they are
    converted inside the working precision so nothing is rounded to double
    first.
    """
    import mpmath

    for dps, steps in _MP_LADDER:
        with mpmath.workdps(dps):
            mp_coeffs = [_to_mp(c) if isinstance(c, GaussianRational) else c for c in coeffs]
            try:
                return list(mpmath.polyroots(mp_coeffs, maxsteps=steps, extraprec=2 * dps))
            except mpmath.libmp.libhyper.NoConvergence:
                continue
    raise OracleFailure(f"no convergence for a degree-{degree_hint} factor")


def _to_mp(c: GaussianRational):
    """Exact value at the current mpmath precision."""
    import mpmath
    return mpmath.mpc(mpmath.mpf(c.re.numerator) / c.re.denominator,
                      mpmath.mpf(c.im.numerator) / c.im.denominator)


def _exact_roots(dense: Sequence[GaussianRational], as_complex: bool = True) -> list:
    """Roots of an exact square-free polynomial (constant term first).

    Resultants of small systems routinely have coefficients spread over
    dozens of orders of magnitude, where companion-matrix eigenvalues in
    double precision are unreliable; the roots are computed with extended
    precision instead (and rounded unless ``as_complex`` is false).
    """
    if len(dense) <= 1:
        return []
    roots = _mp_roots(list(reversed(dense)), len(dense) - 1)
    return [complex(r) for r in roots] if as_complex else roots


def _numeric_roots(dense: list[complex]) -> list[complex]:
    """Roots of a dense polynomial given constant-term-first."""
    coeffs = np.array(dense[::-1], dtype=complex)
    if len(coeffs) <= 1:
        return []
    return [_polish(coeffs, complex(r)) for r in np.roots(coeffs)]


def _cluster(values: list[complex], rtol: float) -> list[tuple[complex, int]]:
    groups: list[list[complex]] = []
    for v in values:
        for g in groups:
            if abs(g[0] - v) <= rtol * max(1.0, abs(v)):
                g.append(v)
                break
        else:
            groups.append([v])
    return [(sum(g) / len(g), len(g)) for g in groups]


def univariate_roots(f: LaurentPoly, tolerance: float = ROOT_CLUSTER_RTOL) -> RootSample:
    """Torus roots of a one-variable Laurent polynomial with multiplicities."""
    if f.nvars != 1:
        raise PreconditionError("univariate_roots needs a polynomial in one variable")
    if f.is_zero():
        raise PreconditionError("the zero polynomial has no isolated roots")
    low = min(e[0] for e in f.support)
    high = max(e[0] for e in f.support)
    dense = [ZERO] * (high - low + 1)
    for e, c in f.items:
        dense[e[0] - low] = c
    points = []
    for factor, mult in square_free_decomposition(dense):
        for z in _exact_roots(factor):
            if abs(z) > 0:
                points.append(((z,), mult))
    return RootSample(tuple(points), tolerance)


def numeric_univariate_roots(dense: Sequence[complex], tolerance: float = ROOT_CLUSTER_RTOL) -> RootSample:
    """Roots of a numeric polynomial (constant term first), clustered."""
    dense = list(dense)
    while dense and dense[-1] == 0:
        dense.pop()
    while dense and dense[0] == 0:
        dense.pop(0)
    roots = _numeric_roots(dense)
    return RootSample(tuple(((z,), m) for z, m in _cluster(roots, tolerance)), tolerance)


# ---------------------------------------------------------------------------
# binomial systems
# ---------------------------------------------------------------------------

def _binomial_data(exponents: Sequence[Sequence[int]]):
    a = [list(map(int, row)) for row in exponents]
    n = len(a)
    if any(len(row) != n for row in a) or la.int_det(a) == 0:
        raise PreconditionError("binomial system needs a nonsingular square exponent matrix")
    u, d, v = la.smith_normal_form(a)
    return u, [d[i][i] for i in range(n)], v


def binomial_solve(exponents: Sequence[Sequence[int]], constants: Sequence) -> RootSample:
    """All solutions of ``x^{a_i} = c_i`` (``|det|`` of them, all simple)."""
    u, diag, v = _binomial_data(exponents)
    n = len(diag)
    consts = [complex(GaussianRational.of(c)) if not isinstance(c, complex) else c for c in constants]
    if any(c == 0 for c in consts):
        raise PreconditionError("binomial constants must be nonzero")
    # y_j^{d_j} = C_j with C_j = prod_i c_i^{u[j][i]}
    logs = [np.log(complex(c)) for c in consts]
    big = [sum(u[j][i] * logs[i] for i in range(n)) for j in range(n)]
    choices = [[(big[j] + 2j * np.pi * m) / diag[j] for m in range(diag[j])] for j in range(n)]
    points = []
    for idx in np.ndindex(*diag):
        zlog = [choices[j][idx[j]] for j in range(n)]
        x = tuple(complex(np.exp(sum(v[i][j] * zlog[j] for j in range(n)))) for i in range(n))
        points.append((x, 1))
    exact = None
    if all(not isinstance(c, complex) for c in constants):
        exact = (u, diag, v, [GaussianRational.of(c) for c in constants])
    return RootSample(tuple(points), ROOT_CLUSTER_RTOL, exact)


def binomial_product_exact(exponents: Sequence[Sequence[int]], constants: Sequence,
                           b: Sequence[int]) -> GaussianRational:
    """Exact product of ``x^b`` over all solutions of ``x^{a_i} = c_i``."""
    u, diag, v = _binomial_data(exponents)
    n = len(diag)
    consts = [GaussianRational.of(c) for c in constants]
    total_count = prod(diag)
    e = [sum(int(b[i]) * v[i][j] for i in range(n)) for j in range(n)]
    result = ONE
    for j in range(n):
        cj = ONE
        for i in range(n):
            cj = cj * consts[i] ** u[j][i]
        sign = 1 if (diag[j] + 1) % 2 == 0 else -1
        result = result * (cj * sign) ** (e[j] * (total_count // diag[j]))
    return result


def as_binomial_system(fs: Sequence[LaurentPoly]):
    """``(exponents, constants)`` when every polynomial has exactly two terms."""
    rows, consts = [], []
    for f in fs:
        if len(f.items) != 2:
            return None
        (p, cp), (q, cq) = f.items
        rows.append([x - y for x, y in zip(p, q)])
        consts.append(-cq / cp)
    return rows, consts


# ---------------------------------------------------------------------------
# bivariate systems
# ---------------------------------------------------------------------------

def _to_sympy(f: LaurentPoly, xs):
    import sympy as sp
    low = [min(e[i] for e in f.support) for i in range(f.nvars)]
    expr = 0
    for e, c in f.items:
        coeff = sp.Rational(c.re.numerator, c.re.denominator) + sp.I * sp.Rational(c.im.numerator, c.im.denominator)
        mono = 1
        for x, k, lo in zip(xs, e, low):
            mono *= x ** (k - lo)
        expr += coeff * mono
    return expr


def _sympy_dense(poly) -> list[GaussianRational]:
    import sympy as sp
    coeffs = poly.all_coeffs()[::-1]
    out = []
    for c in coeffs:
        re, im = sp.re(c), sp.im(c)
        out.append(GaussianRational(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q))))
    return out


def _newton2(f: LaurentPoly, g: LaurentPoly, z: tuple[complex, complex], steps: int = 6):
    fx, fy, gx, gy = f.derivative(0), f.derivative(1), g.derivative(0), g.derivative(1)
    x, y = z
    for _ in range(steps):
        jac = np.array([[fx.evaluate((x, y)), fy.evaluate((x, y))], [gx.evaluate((x, y)), gy.evaluate((x, y))]])
        rhs = np.array([f.evaluate((x, y)), g.evaluate((x, y))])
        if abs(np.linalg.det(jac)) < 1e-300:
            break
        dx, dy = np.linalg.solve(jac, rhs)
        x, y = x - dx, y - dy
        if abs(dx) + abs(dy) <= 1e-16 * (1 + abs(x) + abs(y)):
            break
    return complex(x), complex(y)


def _bivariate_core(f: LaurentPoly, g: LaurentPoly, rng: random.Random):
    import mpmath
    import sympy as sp
    X, Y = sp.symbols("X Y")
    x, y = sp.symbols("x y")
    lam = sp.Rational(rng.randint(1, 97), rng.randint(98, 197))
    fe = sp.expand(_to_sympy(f, (x, y)).subs({x: X + lam * Y, y: Y}, simultaneous=True))
    ge = sp.expand(_to_sympy(g, (x, y)).subs({x: X + lam * Y, y: Y}, simultaneous=True))
    res = sp.Poly(sp.resultant(fe, ge, Y), X, domain="QQ_I")
    if res.is_zero:
        raise PreconditionError("the system has a common factor (infinite zero set)")
    fY = sp.Poly(fe, Y, X, domain="QQ_I")
    gY = sp.Poly(ge, Y, X, domain="QQ_I")
    fterms = [(ey, ex, _sympy_number(c)) for (ey, ex), c in fY.terms()]
    gterms = [(ey, ex, _sympy_number(c)) for (ey, ex), c in gY.terms()]
    lam_c = complex(lam)
    points = []
    with mpmath.workdps(_MP_LADDER[0][0]):
        for factor, mult in square_free_decomposition(_sympy_dense(res)):
            for x0 in _exact_roots(factor, as_complex=False):
                # candidate Y values: roots of f(x0, Y); keep the one that also kills g
                fdense = _mp_in_y(fterms, x0)
                gdense = _mp_in_y(gterms, x0)
                base, other = (fdense, gdense) if len(fdense) >= 2 else (gdense, fdense)
                if len(base) < 2:
                    continue
                candidates = _mp_roots(base[::-1], len(base) - 1)
                y0 = min(candidates, key=lambda w: _mp_relative(other, w))
                xx, yy = complex(x0) + lam_c * complex(y0), complex(y0)
                points.append(((xx, yy), mult))
    return points


def _sympy_number(c) -> GaussianRational:
    import sympy as sp
    re, im = sp.re(c), sp.im(c)
    return GaussianRational(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


def _mp_in_y(terms, x0) -> list:
    """Coefficients in Y (constant first) of a bivariate polynomial at X = x0."""
    deg = max(ey for ey, _, _ in terms)
    dense = [0] * (deg + 1)
    for ey, ex, c in terms:
        dense[ey] += _to_mp(c) * x0 ** ex
    scale = max(abs(c) for c in dense)
    while len(dense) > 1 and abs(dense[-1]) <= 1e-30 * scale:
        dense.pop()
    return dense


def _mp_relative(dense, w) -> float:
    total = sum(c * w ** i for i, c in enumerate(dense))
    scale = sum(abs(c) * abs(w) ** i for i, c in enumerate(dense))
    return float(abs(total) / scale) if scale else float(abs(total))


def _monomial_free(f: LaurentPoly) -> LaurentPoly:
    low = [min(e[i] for e in f.support) for i in range(f.nvars)]
    return f.shift([-x for x in low])


def bivariate_solve(f: LaurentPoly, g: LaurentPoly, seed: int = 7,
                    tolerance: float = ROOT_CLUSTER_RTOL, check_multiplicities: bool = True) -> RootSample:
    """Common torus roots of two Laurent polynomials in two variables."""
    if f.nvars != 2 or g.nvars != 2:
        raise PreconditionError("bivariate_solve needs polynomials in two variables")
    if f.is_zero() or g.is_zero():
        raise PreconditionError("zero polynomial has an infinite zero set")
    rng = random.Random(seed)
    f0, g0 = _monomial_free(f), _monomial_free(g)
    raw = _bivariate_core(f0, g0, rng)
    points = []
    for z, mult in raw:
        if mult == 1:
            z = _newton2(f0, g0, z)
        if min(abs(z[0]), abs(z[1])) <= 1e-10 * max(1.0, abs(z[0]), abs(z[1])):
            continue
        worst = max(relative_residual(f0, z), relative_residual(g0, z))
        if worst > RESIDUAL_LIMIT:
            raise OracleFailure(f"recovered point {z} has relative residual {worst:.3g}")
        points.append((z, mult))
    if check_multiplicities and any(m > 1 for _, m in points):
        _check_multiplicities(f0, g0, points, rng)
    return RootSample(tuple(points), tolerance)


def _check_multiplicities(f, g, points, rng: random.Random):
    eps = Fraction(1, 10 ** 6)
    bump = LaurentPoly.constant(2, GaussianRational(eps * rng.randint(1, 9), eps * rng.randint(1, 9)))
    pert = _bivariate_core(f + bump, g, rng)
    for z, mult in points:
        if mult == 1:
            continue
        radius = 0.05 * max(1.0, abs(z[0]), abs(z[1]))
        near = sum(m for w, m in pert if abs(w[0] - z[0]) + abs(w[1] - z[1]) <= radius)
        if near != mult:
            raise OracleFailure(f"multiplicity {mult} at {z} not confirmed by perturbation ({near})")


# ---------------------------------------------------------------------------
# dispatch and symmetric functions of roots
# ---------------------------------------------------------------------------

def solve(fs: Sequence[LaurentPoly], seed: int = 7) -> RootSample:
    """Solve a square system with whichever exact/numeric route applies."""
    n = len(fs)
    if any(f.nvars != n for f in fs):
        raise PreconditionError("need a square system")
    if n == 1:
        return univariate_roots(fs[0])
    binom = as_binomial_system(fs)
    if binom is not None:
        return binomial_solve(*binom)
    if n == 2:
        return bivariate_solve(fs[0], fs[1], seed=seed)
    raise PreconditionError("non-binomial systems in three or more variables are out of reach")


def root_count(sample: RootSample) -> int:
    return sum(m for _, m in sample.points)


def sum_over_roots(h: LaurentPoly, sample: RootSample) -> complex:
    return sum((h.evaluate(z) * m for z, m in sample.points), 0j)


def product_over_roots(b: Sequence[int], sample: RootSample) -> complex:
    total = 1 + 0j
    for z, m in sample.points:
        val = 1 + 0j
        for w, k in zip(z, b):
            val *= w ** int(k)
        total *= val ** m
    return total


@dataclass(frozen=True)
class CompositePoly0:
    """``prod (t - x^b(z))`` over the roots, with power-sum reconstruction."""

    coefficients: tuple[complex, ...]          # constant term first
    power_sums: tuple[complex, ...]            # p_1 .. p_N
    elementary: tuple[complex, ...]            # e_0 .. e_N via Newton's identities

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def newton_segment(self, rtol: float = COMPARE_RTOL) -> tuple[int, int]:
        scale = max(abs(c) for c in self.coefficients)
        nz = [i for i, c in enumerate(self.coefficients) if abs(c) > rtol * scale]
        return nz[0], nz[-1]


def composite_poly_0dim(fs: Sequence[LaurentPoly], b: Sequence[int], seed: int = 7) -> CompositePoly0:
    sample = solve(fs, seed=seed)
    values = []
    for z, m in sample.points:
        val = 1 + 0j
        for w, k in zip(z, b):
            val *= w ** int(k)
        values += [val] * m
    coeffs = np.array([1 + 0j])
    for v in values:
        coeffs = np.convolve(coeffs, np.array([1, -v]))   # highest degree first
    coefficients = tuple(complex(c) for c in coeffs[::-1])
    n = len(values)
    psums = tuple(sum(v ** m for v in values) for m in range(1, n + 1))
    elem = [1 + 0j]
    for m in range(1, n + 1):
        acc = sum(((-1) ** (i - 1)) * elem[m - i] * psums[i - 1] for i in range(1, m + 1))
        elem.append(acc / m)
    return CompositePoly0(coefficients, psums, tuple(elem))
