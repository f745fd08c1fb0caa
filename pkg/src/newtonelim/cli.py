"""Batch command line front-end.

Every subcommand reads one problem file (JSON, see ``docs/problem-schema.json``)
from ``--input`` or standard input, runs the like-named library operation and
writes a result document to standard output::

    newtonelim composite-newton --input triangle.json
    newtonelim mixed-volume < segments.json
    newtonelim plot --input polygons.json --out polygons.svg

Exit status is 0 on success, 2 when the data violates an operation's
precondition, 3 when the problem file cannot be parsed and 1 when the
numeric oracle fails; failures print a machine-readable error object.
The subcommand decides the operation; a ``query.op`` in the file that names
a different one is echoed back as ``file_op``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Any, Callable, Sequence

import jsonschema

from . import __version__
from . import elimination as elim
from . import fiber, oracle
from .errors import NewtonElimError, OracleFailure, PreconditionError
from .laurent import (
    GaussianRational,
    LaurentPoly,
    Refuted,
    Unknown,
    Verified,
    newton_polytope,
    nondegeneracy_check,
)
from .lattice_geom import LatticeMap, Polytope, Subspace, convex_hull
from .mixed_volume import bernstein_vanishing, mixed_volume
from .schema import PROBLEM_SCHEMA

EXIT_OK = 0
EXIT_ORACLE = 1
EXIT_PRECONDITION = 2
EXIT_PARSE = 3

DEFAULT_TOLERANCE = "1/100000000"


class ProblemParseError(Exception):
    """The problem file is not valid JSON or does not match the schema."""


# ---------------------------------------------------------------------------
# wire format
# ---------------------------------------------------------------------------

def rational_out(x) -> int | str:
    """Integers stay JSON integers; everything else becomes a ``"p/q"`` string."""
    q = Fraction(x)
    return int(q) if q.denominator == 1 else str(q)


def scalar_out(x) -> str:
    return str(Fraction(x)) if not isinstance(x, GaussianRational) else str(x)


def vertices_out(poly: Polytope) -> list[list[int | str]]:
    return [[rational_out(c) for c in v] for v in poly.vertices]


def numeric_out(z: complex, tolerance: str) -> dict:
    return {"numeric": True, "tolerance": tolerance, "re": float(z.real), "im": float(z.imag)}


def _rational_in(x) -> Fraction:
    try:
        return Fraction(x) if isinstance(x, int) else Fraction(x.replace(" ", ""))
    except (ValueError, ZeroDivisionError) as exc:
        raise ProblemParseError(f"bad rational {x!r}") from exc


@dataclass
class ProblemFile:
    polytopes: dict[str, tuple[tuple[Fraction, ...], ...]] = field(default_factory=dict)
    polynomials: dict[str, LaurentPoly] = field(default_factory=dict)
    projection: tuple[tuple[int, ...], ...] | None = None
    op: str | None = None
    args: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_json(cls, doc: Any) -> "ProblemFile":
        try:
            jsonschema.validate(doc, PROBLEM_SCHEMA)
        except jsonschema.ValidationError as exc:
            path = "/".join(str(p) for p in exc.absolute_path)
            raise ProblemParseError(f"schema violation at '{path}': {exc.message}") from None
        polytopes = {}
        for name, pts in doc.get("polytopes", {}).items():
            vecs = tuple(tuple(_rational_in(x) for x in p) for p in pts)
            if len({len(v) for v in vecs}) != 1:
                raise ProblemParseError(f"polytope '{name}' mixes dimensions")
            polytopes[name] = vecs
        polynomials = {}
        for name, terms in doc.get("polynomials", {}).items():
            if not terms:
                raise ProblemParseError(f"polynomial '{name}' has no terms")
            try:
                polynomials[name] = LaurentPoly.from_json(terms)
            except (ValueError, ZeroDivisionError) as exc:
                raise ProblemParseError(f"polynomial '{name}': {exc}") from None
        proj = doc.get("projection")
        if proj is not None:
            if not proj or len({len(r) for r in proj}) != 1:
                raise ProblemParseError("projection must be a non-empty rectangular matrix")
            proj = tuple(tuple(r) for r in proj)
        query = doc.get("query", {})
        pf = cls(polytopes, polynomials, proj, query.get("op"), dict(query.get("args", {})))
        pf._check_references()
        return pf

    def _check_references(self):
        for key, table in (("polytopes", self.polytopes), ("tests", self.polytopes),
                           ("polynomials", self.polynomials)):
            names = self.args.get(key)
            if names is None:
                continue
            if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
                raise ProblemParseError(f"argument '{key}' must be a list of names")
            missing = [n for n in names if n not in table]
            if missing:
                raise ProblemParseError(f"undefined {key} referenced: {', '.join(missing)}")
        for key, table in (("polytope", self.polytopes), ("h", self.polynomials)):
            name = self.args.get(key)
            if name is not None and name not in table:
                raise ProblemParseError(f"undefined name referenced by '{key}': {name!r}")

    def to_json(self) -> dict:
        doc: dict[str, Any] = {}
        if self.polytopes:
            doc["polytopes"] = {k: [[rational_out(x) for x in p] for p in v]
                                for k, v in self.polytopes.items()}
        if self.polynomials:
            doc["polynomials"] = {k: v.to_json() for k, v in self.polynomials.items()}
        if self.projection is not None:
            doc["projection"] = [list(r) for r in self.projection]
        query: dict[str, Any] = {}
        if self.op is not None:
            query["op"] = self.op
        if self.args:
            query["args"] = self.args
        if query:
            doc["query"] = query
        return doc


def parse_problem(text: str) -> ProblemFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemParseError(f"malformed JSON: {exc}") from None
    return ProblemFile.from_json(doc)


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Settings:
    seed: int
    tolerance: str

    @property
    def rtol(self) -> float:
        return float(Fraction(self.tolerance))


def _named_polytopes(pf: ProblemFile, key: str = "polytopes") -> list[Polytope]:
    names = pf.args.get(key, list(pf.polytopes) if key == "polytopes" else [])
    return [convex_hull(pf.polytopes[n]) for n in names]


def _named_polynomials(pf: ProblemFile) -> list[LaurentPoly]:
    names = pf.args.get("polynomials", list(pf.polynomials))
    return [pf.polynomials[n] for n in names]


def _polytopes_or_newton(pf: ProblemFile) -> list[Polytope]:
    if "polynomials" in pf.args or ("polytopes" not in pf.args and not pf.polytopes):
        return [newton_polytope(f) for f in _named_polynomials(pf)]
    return _named_polytopes(pf)


def _projection(pf: ProblemFile, n: int, count: int) -> LatticeMap:
    if pf.projection is not None:
        pi_x = LatticeMap.of(pf.projection)
        if pi_x.target_dim != n:
            raise PreconditionError(f"projection has {pi_x.target_dim} rows, polytopes live in Z^{n}")
        return pi_x
    return elim.standard_projection(n, count - 1)


def _int_vector(pf: ProblemFile, key: str, required: bool = True) -> tuple[int, ...] | None:
    val = pf.args.get(key)
    if val is None:
        if required:
            raise PreconditionError(f"missing argument '{key}'")
        return None
    if not isinstance(val, list) or not all(isinstance(x, int) for x in val):
        raise PreconditionError(f"argument '{key}' must be an integer vector")
    return tuple(val)


def _require(items: Sequence, what: str):
    if not items:
        raise PreconditionError(f"no {what} given")


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def op_mixed_volume(pf: ProblemFile, st: Settings) -> dict:
    polys = _polytopes_or_newton(pf)
    _require(polys, "polytopes")
    mv = mixed_volume(polys)
    return {"mixed_volume": scalar_out(mv), "normalized": scalar_out(factorial(len(polys)) * mv)}


def op_fiber_polytope(pf: ProblemFile, st: Settings) -> dict:
    name = pf.args.get("polytope") or next(iter(pf.polytopes), None)
    if name is None:
        raise PreconditionError("no polytope given")
    poly = convex_hull(pf.polytopes[name])
    if pf.projection is None:
        raise PreconditionError("fiber-polytope needs a projection matrix")
    ctx = fiber.ProjectionContext.from_lattice_map(_projection(pf, poly.ambient_dim, 1))
    body = fiber.minkowski_integral(poly, ctx, apply_u=bool(pf.args.get("apply_u", True)))
    return {"vertices": vertices_out(body), "k": ctx.k}


def op_mixed_fiber(pf: ProblemFile, st: Settings) -> dict:
    polys = _polytopes_or_newton(pf)
    _require(polys, "polytopes")
    ctx = fiber.ProjectionContext.from_lattice_map(_projection(pf, polys[0].ambient_dim, len(polys)))
    mf = fiber.mixed_fiber(polys, ctx)
    return {"vertices": vertices_out(mf),
            "composite_body": vertices_out(mf.scale(factorial(ctx.k + 1)))}


def op_composite_newton(pf: ProblemFile, st: Settings) -> dict:
    polys = _polytopes_or_newton(pf)
    _require(polys, "polytopes")
    pi_x = _projection(pf, polys[0].ambient_dim, len(polys))
    cnp = elim.composite_newton_polytope(polys, pi_x)
    return {"vertices": vertices_out(cnp)}


def op_verify_star(pf: ProblemFile, st: Settings) -> dict:
    polys = _polytopes_or_newton(pf)
    _require(polys, "polytopes")
    tests = _named_polytopes(pf, "tests")
    pi_x = _projection(pf, polys[0].ambient_dim, len(polys))
    lhs, rhs = elim.verify_star_identity(polys, pi_x, tests)
    return {"lhs": scalar_out(lhs), "rhs": scalar_out(rhs), "equal": lhs == rhs}


def op_bernstein_count(pf: ProblemFile, st: Settings) -> dict:
    polys = _polytopes_or_newton(pf)
    _require(polys, "polytopes")
    out = {"count": scalar_out(factorial(len(polys)) * mixed_volume(polys)),
           "vanishing": bernstein_vanishing(polys)}
    if pf.args.get("oracle") and pf.polynomials:
        sample = oracle.solve(_named_polynomials(pf), seed=st.seed)
        out["oracle_count"] = {"numeric": True, "tolerance": st.tolerance,
                               "value": oracle.root_count(sample)}
    return out


def _value_out(v, st: Settings):
    if isinstance(v, GaussianRational):
        return str(v)
    return numeric_out(complex(v), st.tolerance)


def op_gk_sum(pf: ProblemFile, st: Settings) -> dict:
    fs = _named_polynomials(pf)
    _require(fs, "polynomials")
    h = pf.polynomials[pf.args["h"]] if "h" in pf.args else LaurentPoly.constant(fs[0].nvars, 1)
    res = elim.gk_sum(fs, h)
    return {"value": str(res.value),
            "residues": [{"vertex": [rational_out(x) for x in v], "coefficient": c, "residue": str(r)}
                         for v, c, r in res.residues]}


def op_kh_product(pf: ProblemFile, st: Settings) -> dict:
    fs = _named_polynomials(pf)
    _require(fs, "polynomials")
    b = _int_vector(pf, "b")
    lifts = pf.args.get("lifts")
    if lifts is not None:
        try:
            lifts = [elim.LiftedPolyhedron.of([(p, _rational_in(h)) for p, h in pairs]) for pairs in lifts]
        except (TypeError, ValueError) as exc:
            if isinstance(exc, PreconditionError):
                raise
            raise PreconditionError(f"malformed lifts: {exc}") from None
    res = elim.kh_product(fs, b, lifts=lifts, seed=st.seed)
    return {"value": str(res.value), "route": res.route,
            "terms": [{"vertex": [rational_out(x) for x in t.vertex],
                       "parts": [[rational_out(x) for x in p] for p in t.parts],
                       "coefficient": t.coefficient, "symbol": str(t.symbol)} for t in res.terms]}


def op_vertex_ratio(pf: ProblemFile, st: Settings) -> dict:
    fs = _named_polynomials(pf)
    _require(fs, "polynomials")
    k = pf.args.get("k", len(fs) - 1)
    res = elim.vertex_ratio(fs, k, _int_vector(pf, "gamma1"), _int_vector(pf, "gamma2"),
                            route=pf.args.get("route", "auto"), seed=st.seed)
    return {"b1": list(res.b1), "b2": list(res.b2), "sign": res.sign,
            "product": _value_out(res.product, st), "ratio": _value_out(res.ratio, st),
            "route": res.route}


def op_sqfree_mult(pf: ProblemFile, st: Settings) -> dict:
    if "polynomials" in pf.args:
        sets = [[e for e, _ in f.items] for f in _named_polynomials(pf)]
    else:
        names = pf.args.get("polytopes", list(pf.polytopes))
        sets = [pf.polytopes[n] for n in names]
    _require(sets, "point sets")
    vecs = pf.args.get("subspace")
    if not isinstance(vecs, list):
        raise PreconditionError("missing argument 'subspace' (list of integer vectors)")
    sub = Subspace.span(vecs, len(sets[0][0]))
    rep = elim.sqfree_multiplicity(sets, sub)
    return {"d": rep.d, "branch": rep.branch, "subset": list(rep.subset), "index": rep.index,
            "mixed_volume": scalar_out(rep.mixed_volume),
            "essential": elim.is_essential(sets, sub) if rep.d else False}


def op_check_developed(pf: ProblemFile, st: Settings) -> dict:
    polys = _polytopes_or_newton(pf)
    _require(polys, "polytopes")
    out: dict[str, Any] = {"developed": elim.is_developed(polys)}
    b = _int_vector(pf, "b", required=False)
    if b is not None:
        out["developed_wrt_b"] = elim.is_developed_wrt(polys, b)
    if pf.polynomials and "polytopes" not in pf.args:
        verdict = nondegeneracy_check(_named_polynomials(pf), tolerance=st.rtol)
        if isinstance(verdict, Verified):
            out["nondegenerate"] = {"status": "verified", "faces": verdict.checked_faces}
        elif isinstance(verdict, Refuted):
            out["nondegenerate"] = {"status": "refuted", "normal": [scalar_out(x) for x in verdict.normal]}
        else:
            assert isinstance(verdict, Unknown)
            out["nondegenerate"] = {"status": "unknown", "reason": verdict.reason}
    return out


def op_oracle_solve(pf: ProblemFile, st: Settings) -> dict:
    fs = _named_polynomials(pf)
    _require(fs, "polynomials")
    sample = oracle.solve(fs, seed=st.seed)
    roots = sorted(([[float(c.real), float(c.imag)] for c in z], m) for z, m in sample.points)
    return {"numeric": True, "tolerance": st.tolerance, "count": oracle.root_count(sample),
            "roots": [{"point": z, "multiplicity": m} for z, m in roots]}


# ---------------------------------------------------------------------------
# SVG output
# ---------------------------------------------------------------------------

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _polygon_order(pts: Sequence[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    """Counter-clockwise order of the vertices of a convex polygon."""
    import math
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    return sorted(pts, key=lambda p: math.atan2(float(p[1] - cy), float(p[0] - cx)))


def render_svg(shapes: Sequence[tuple[str, Polytope, Sequence]], unit: int = 40) -> str:
    """SVG 1.1 drawing of 2-D polytopes (with optional support points)."""
    allpts = [v for _, p, extra in shapes for v in list(p.vertices) + list(extra)]
    xs = [float(v[0]) for v in allpts]
    ys = [float(v[1]) for v in allpts]
    x0, x1 = int(min(xs)) - 1, int(max(xs)) + 1
    y0, y1 = int(min(ys)) - 1, int(max(ys)) + 1
    width, height = (x1 - x0) * unit, (y1 - y0) * unit

    def sx(x) -> str:
        return f"{(float(x) - x0) * unit:g}"

    def sy(y) -> str:
        return f"{(y1 - float(y)) * unit:g}"

    out = ['<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
           '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" '
           '"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           '<g stroke="#dddddd" stroke-width="1">']
    for x in range(x0, x1 + 1):
        out.append(f'<line x1="{sx(x)}" y1="0" x2="{sx(x)}" y2="{height}"/>')
    for y in range(y0, y1 + 1):
        out.append(f'<line x1="0" y1="{sy(y)}" x2="{width}" y2="{sy(y)}"/>')
    out.append("</g>")
    for i, (name, poly, extra) in enumerate(shapes):
        color = _PALETTE[i % len(_PALETTE)]
        out.append(f'<g id="{name}" stroke="{color}" fill="{color}">')
        verts = list(poly.vertices)
        if poly.dim == 2:
            pts = " ".join(f"{sx(x)},{sy(y)}" for x, y in _polygon_order(verts))
            out.append(f'<polygon points="{pts}" fill-opacity="0.25" stroke-width="2"/>')
        elif poly.dim == 1:
            (ax, ay), (bx, by) = verts[0], verts[-1]
            out.append(f'<line x1="{sx(ax)}" y1="{sy(ay)}" x2="{sx(bx)}" y2="{sy(by)}" stroke-width="2"/>')
        for x, y in sorted(set(verts) | set(extra)):
            out.append(f'<circle cx="{sx(x)}" cy="{sy(y)}" r="3"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def op_plot(pf: ProblemFile, st: Settings, out_path: str | None = None) -> dict:
    shapes = []
    names = pf.args.get("polytopes", list(pf.polytopes) if "polynomials" not in pf.args else [])
    for n in names:
        shapes.append((n, convex_hull(pf.polytopes[n]), []))
    pnames = pf.args.get("polynomials", list(pf.polynomials) if "polytopes" not in pf.args else [])
    for n in pnames:
        f = pf.polynomials[n]
        shapes.append((n, newton_polytope(f), [tuple(Fraction(x) for x in e) for e, _ in f.items]))
    _require(shapes, "polytopes or polynomials to plot")
    if any(p.ambient_dim != 2 for _, p, _ in shapes):
        raise PreconditionError("plot draws planar polytopes only")
    svg = render_svg(shapes)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(svg)
        return {"svg_path": out_path, "shapes": [n for n, _, _ in shapes]}
    return {"svg": svg, "shapes": [n for n, _, _ in shapes]}


OPERATIONS: dict[str, Callable[..., dict]] = {
    "mixed-volume": op_mixed_volume,
    "fiber-polytope": op_fiber_polytope,
    "mixed-fiber": op_mixed_fiber,
    "composite-newton": op_composite_newton,
    "verify-star": op_verify_star,
    "bernstein-count": op_bernstein_count,
    "gk-sum": op_gk_sum,
    "kh-product": op_kh_product,
    "vertex-ratio": op_vertex_ratio,
    "sqfree-mult": op_sqfree_mult,
    "check-developed": op_check_developed,
    "oracle-solve": op_oracle_solve,
    "plot": op_plot,
}


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def run(command: str, text: str, seed: int = 0, tolerance: str = DEFAULT_TOLERANCE,
        out_path: str | None = None) -> tuple[int, dict]:
    """Execute one query; returns ``(exit status, document)``."""
    started = time.perf_counter()
    try:
        tol = Fraction(tolerance)
        if tol <= 0:
            raise ValueError
    except (ValueError, ZeroDivisionError):
        return EXIT_PARSE, _error("parse", "ProblemParseError", f"bad tolerance {tolerance!r}")
    st = Settings(seed, str(tol))
    try:
        pf = parse_problem(text)
    except ProblemParseError as exc:
        return EXIT_PARSE, _error("parse", type(exc).__name__, str(exc))
    parsed = time.perf_counter()
    try:
        handler = OPERATIONS[command]
        result = handler(pf, st, out_path) if command == "plot" else handler(pf, st)
    except OracleFailure as exc:
        return EXIT_ORACLE, _error("oracle", type(exc).__name__, str(exc))
    except (PreconditionError, KeyError, TypeError) as exc:
        return EXIT_PRECONDITION, _error("precondition", type(exc).__name__, str(exc))
    except NewtonElimError as exc:
        return EXIT_PRECONDITION, _error("precondition", type(exc).__name__, str(exc))
    done = time.perf_counter()
    query = {"op": command, "args": pf.args}
    if pf.op is not None and pf.op != command:
        query["file_op"] = pf.op
    doc = {
        "query": query,
        "result": result,
        "provenance": {
            "library": "newtonelim",
            "version": __version__,
            "seed": seed,
            "tolerance": st.tolerance,
            "timings": {"parse_seconds": round(parsed - started, 6),
                        "compute_seconds": round(done - parsed, 6)},
        },
    }
    return EXIT_OK, doc


def _error(kind: str, name: str, message: str) -> dict:
    return {"error": {"kind": kind, "type": name, "message": message}}


def _text(doc: Any, prefix: str = "") -> list[str]:
    if isinstance(doc, dict):
        lines = []
        for k, v in doc.items():
            key = f"{prefix}.{k}" if prefix else str(k)
            lines += _text(v, key)
        return lines
    return [f"{prefix}: {json.dumps(doc)}"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="newtonelim", description="Elimination theory for Newton polytopes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in OPERATIONS:
        p = sub.add_parser(name, help=(OPERATIONS[name].__doc__ or name.replace("-", " ")))
        p.add_argument("--input", metavar="PATH", help="problem file (default: standard input)")
        p.add_argument("--out", metavar="PATH", help="output path (SVG for plot, result document otherwise)")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized steps (unsigned 64-bit)")
        p.add_argument("--tolerance", default=DEFAULT_TOLERANCE, metavar="RATIONAL",
                       help="relative tolerance of oracle numerics, e.g. 1/100000000")
        p.add_argument("--format", choices=("json", "text"), default="json")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if not 0 <= args.seed < 2 ** 64:
        status, doc = EXIT_PARSE, _error("parse", "ProblemParseError", "seed must be an unsigned 64-bit integer")
    else:
        try:
            if args.input:
                with open(args.input, encoding="utf-8") as fh:
                    text = fh.read()
            else:
                text = sys.stdin.read()
        except OSError as exc:
            status, doc = EXIT_PARSE, _error("parse", type(exc).__name__, str(exc))
        else:
            svg_out = args.out if args.command == "plot" else None
            status, doc = run(args.command, text, args.seed, args.tolerance, svg_out)
    rendered = (json.dumps(doc, indent=2, sort_keys=True) + "\n" if args.format == "json"
                else "\n".join(_text(doc)) + "\n")
    if args.out and args.command != "plot" and status == EXIT_OK:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    return status


if __name__ == "__main__":
    sys.exit(main())
