"""JSON documents, SVG rendering, circle extraction and the command line driver."""

from __future__ import annotations

import json
import math
import sys
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import click
import mpmath
import numpy as np

from . import integrability_verify as iv
from .crossratio_core import AngleTriple, PatternMap, SingularEdgeError, dualize, max_quad_residual
from .isomonodromic import (
    build_log, build_z2, build_z3, build_zc, constraint_params_for, max_constraint_residual)
from .lattice import (VERTEX_OFFSETS, Index, Region, REGION_KINDS, add, flower, region_quads, step,
                      sublattice_class)
from .projective_complex import CPoint, DomainError, circumcircle
from .special_patterns import (
    build_confsym, compute_TS, conformal_symmetry_residual, doyle_radii, hexagon_T_residual,
    layout_from_radii,
    max_flower_residual, radii_from_pattern)

FORMAT_VERSION = 1
CONCYCLIC_TOL = 1e-7

# variants that are not lattice maps with the cross-ratios fixed by their edge constants
NOT_CROSS_RATIO = ("confsym", "reconstructed")
# closed-form z^3: the k+l+m = 0 values are centers but the odd ones are not intersection points
NO_CIRCLES = ("z3",)
# variants whose k+l+m = 0 values are not Euclidean centers
NOT_CENTERED = NOT_CROSS_RATIO + NO_CIRCLES + ("inverted",)

DEFAULT_TOLERANCES = {
    "crossratio": 1e-9,
    "constraint": 1e-8,
    "lax": 1e-9,
    "iso": 1e-8,
    "toda": 1e-9,
    "conformal": 1e-9,
    "radii": 1e-8,
}
SUITES = tuple(DEFAULT_TOLERANCES)


class PatternFormatError(ValueError):
    """A pattern document is malformed or has the wrong version."""


class ConcyclicityError(DomainError):
    pass


class NoGeometryError(ValueError):
    pass


# ---------------------------------------------------------------- circles

class IndexedCircle(NamedTuple):
    index: Index
    center: complex
    radius: float


def _variant(pattern: PatternMap) -> str | None:
    return pattern.meta.get("variant")


def _is_kite(pattern: PatternMap) -> bool:
    return _variant(pattern) not in NOT_CENTERED


def extract_circles(pattern: PatternMap, tol: float = CONCYCLIC_TOL) -> list[IndexedCircle]:
    """One circle per center index.

    Kite patterns use the center value and the common distance to the known
    intersection points (at least two are needed).  Other patterns need all
    six points: the circle through three alternate ones is checked against
    the remaining three.  Circles through infinity (lines) and circles shrunk
    to a point are skipped.
    """
    if _variant(pattern) in NO_CIRCLES:
        raise DomainError("the odd values of this closed form are not intersection points of circles")
    kite = _is_kite(pattern)
    if kite:
        centers = [c for c in pattern.indices() if sublattice_class(c) == 0]
    else:
        # patterns without center values: every center next to a known point
        centers = sorted({add(v, d, -1) for v in pattern.values for d in VERTEX_OFFSETS
                          if sublattice_class(v) == sublattice_class(d)})
    out = []
    for c in centers:
        vs = flower(c).vertices
        if kite:
            pts = [pattern[v] for v in vs if v in pattern]
            if not pattern.is_finite(c) or len(pts) < 2 or any(p.is_infinite for p in pts):
                continue
            zc = pattern.z(c)
            ds = [abs(p.to_complex() - zc) for p in pts]
            r = max(ds)
            if r == 0 or r <= 1e-12 * max(1.0, abs(zc)):
                continue
            if max(ds) - min(ds) > tol * r:
                raise ConcyclicityError(f"intersection points around {c} are not equidistant from its center")
            out.append(IndexedCircle(c, zc, r))
            continue
        if not all(v in pattern for v in vs):
            continue
        pts = [pattern[v] for v in vs]
        try:
            circ = circumcircle(pts[0], pts[2], pts[4])
        except DomainError:
            continue
        if circ.is_line:
            continue
        for p in pts[1::2]:
            if not circ.contains(p, tol):
                raise ConcyclicityError(f"intersection points around {c} are not concyclic")
        out.append(IndexedCircle(c, circ.center, circ.radius))
    return out


# ---------------------------------------------------------------- JSON

def _plain(x):
    """Meta values as JSON-ready Python objects."""
    if isinstance(x, Mapping):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (mpmath.mpc, complex, np.complexfloating)):
        z = complex(x)
        return [z.real, z.imag]
    if isinstance(x, (float, np.floating, mpmath.mpf)):
        return float(x)
    return str(x)


def _tolerance_report(pattern: PatternMap) -> dict:
    report = {k: _plain(pattern.meta[k]) for k in
              ("max_face_disagreement", "layout_closure", "relation_defect", "dual_closure")
              if k in pattern.meta}
    if _variant(pattern) not in NOT_CROSS_RATIO:
        quads = [q for q in region_quads(pattern.region) if all(pattern.is_finite(p) for p in q)]
        if quads:
            report["max_quad_residual"] = max_quad_residual(pattern, quads)[0]
    return report


def _canonical(pattern: PatternMap) -> PatternMap:
    """Values as they will read back from a document, so derived numbers are reproducible."""
    vals = {p: v if v.is_infinite else CPoint.of(v.to_complex()) for p, v in pattern.values.items()}
    return PatternMap(pattern.region, vals, tuple(complex(d) for d in pattern.deltas), pattern.meta)


def pattern_document(pattern: PatternMap, circles: Sequence[IndexedCircle] | None = None) -> dict:
    pattern = _canonical(pattern)
    meta = _plain(dict(pattern.meta))
    meta["deltas"] = [[complex(d).real, complex(d).imag] for d in pattern.deltas]
    meta["region"] = [pattern.region.kind, pattern.region.size]
    meta["tolerance_report"] = _tolerance_report(pattern)
    points = []
    for p in pattern.indices():
        v = pattern[p]
        z = 0j if v.is_infinite else v.to_complex()
        points.append({"k": p[0], "l": p[1], "m": p[2], "re": z.real, "im": z.imag,
                       "infinite": v.is_infinite})
    if circles is None:
        try:
            circles = extract_circles(pattern)
        except DomainError:
            circles = []
    circ = [{"center_re": c.center.real, "center_im": c.center.imag, "radius": c.radius,
             "index": list(c.index)} for c in sorted(circles)]
    return {"version": FORMAT_VERSION, "meta": meta, "points": points, "circles": circ}


def dumps(pattern: PatternMap) -> str:
    return json.dumps(pattern_document(pattern), sort_keys=True, indent=1) + "\n"


def export_json(pattern: PatternMap, path) -> None:
    Path(path).write_text(dumps(pattern))


def loads(text: str) -> PatternMap:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise PatternFormatError(f"not a JSON document: {e}") from None
    if not isinstance(doc, dict):
        raise PatternFormatError("document must be a JSON object")
    if doc.get("version") != FORMAT_VERSION:
        raise PatternFormatError(f"unsupported document version {doc.get('version')!r}")
    try:
        meta = dict(doc["meta"])
        kind, size = meta["region"]
        region = Region(kind, int(size))
        deltas = tuple(complex(re, im) for re, im in meta["deltas"])
        if len(deltas) != 3:
            raise PatternFormatError("need three edge constants")
        values = {}
        for pt in doc["points"]:
            p = (int(pt["k"]), int(pt["l"]), int(pt["m"]))
            if pt["infinite"]:
                values[p] = CPoint.of(None)
            else:
                values[p] = CPoint.of(complex(float(pt["re"]), float(pt["im"])))
        for c in doc.get("circles", []):
            if sum(c["index"]) != 0:
                raise PatternFormatError(f"circle index {c['index']} is not a center index")
    except PatternFormatError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise PatternFormatError(f"malformed pattern document: {e!r}") from None
    for k in ("deltas", "region", "tolerance_report"):
        meta.pop(k, None)
    return PatternMap(region, values, deltas, meta)


def import_json(path) -> PatternMap:
    return loads(Path(path).read_text())


# ---------------------------------------------------------------- SVG

@dataclass(frozen=True)
class SvgOptions:
    stroke_width: float | None = None   # default: 0.2 % of the larger viewbox side
    point_markers: bool = False
    padding: float = 0.05               # fraction of the larger side


def _num(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("", "-0") else s


def svg_string(source: PatternMap | Iterable[IndexedCircle], options: SvgOptions = SvgOptions()) -> str:
    if isinstance(source, PatternMap):
        circles = extract_circles(source)
        points = [(p, source.z(p)) for p in source.indices()
                  if sublattice_class(p) != 0 and source.is_finite(p)] if options.point_markers else []
    else:
        circles, points = list(source), []
    circles = sorted(c for c in circles if math.isfinite(c.radius) and c.radius > 0)
    if not circles:
        raise NoGeometryError("nothing finite to draw")
    xs = [c.center.real - c.radius for c in circles] + [c.center.real + c.radius for c in circles]
    ys = [-c.center.imag - c.radius for c in circles] + [-c.center.imag + c.radius for c in circles]
    xs += [z.real for _, z in points]
    ys += [-z.imag for _, z in points]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    side = max(x1 - x0, y1 - y0)
    pad = options.padding * side
    x0, y0, w, h = x0 - pad, y0 - pad, x1 - x0 + 2 * pad, y1 - y0 + 2 * pad
    sw = options.stroke_width if options.stroke_width is not None else 0.002 * side
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_num(x0)} {_num(y0)} {_num(w)} {_num(h)}">',
        f'<g fill="none" stroke="black" stroke-width="{_num(sw)}">',
    ]
    for c in circles:
        k, l, m = c.index
        lines.append(f'<circle id="c_{k}_{l}_{m}" cx="{_num(c.center.real)}" cy="{_num(-c.center.imag)}" '
                     f'r="{_num(c.radius)}"/>')
    lines.append("</g>")
    if points:
        lines.append('<g fill="red" stroke="none">')
        for p, z in sorted(points):
            lines.append(f'<circle cx="{_num(z.real)}" cy="{_num(-z.imag)}" r="{_num(2 * sw)}"/>')
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def export_svg(source: PatternMap | Iterable[IndexedCircle], path, options: SvgOptions = SvgOptions()) -> None:
    Path(path).write_text(svg_string(source, options))


# ---------------------------------------------------------------- verification suites

class CheckResult(NamedTuple):
    suite: str
    name: str
    value: float | None
    tol: float
    note: str = ""

    @property
    def status(self) -> str:
        if self.value is None:
            return "SKIP"
        return "PASS" if self.value <= self.tol else "FAIL"


def _finite_quads(pattern: PatternMap) -> list:
    return [q for q in region_quads(pattern.region) if all(pattern.is_finite(p) for p in q)]


def _sample(items: list, count: int) -> list:
    if len(items) <= count:
        return items
    stride = len(items) / count
    return [items[int(i * stride)] for i in range(count)]


def _max_over(fn, items) -> tuple[float | None, int]:
    vals = []
    for x in items:
        try:
            vals.append(fn(x))
        except (DomainError, KeyError):
            continue
    return (max(vals) if vals else None), len(vals)


def _base_point(pattern: PatternMap) -> Index | None:
    """The origin, or the nearest finite point with a nondegenerate edge."""
    def usable(p):
        return pattern.is_finite(p) and any(
            iv._usable_edge(pattern, p, step(p, n, sg)) for n in (1, 2, 3) for sg in (1, -1))
    cands = [p for p in pattern.indices() if usable(p)]
    return min(cands, key=lambda p: (sum(t * t for t in p), p)) if cands else None


def dual_of(pattern: PatternMap) -> PatternMap:
    """Dual normalized to vanish at the origin when the origin edges allow it."""
    base = _base_point(pattern)
    try:
        return dualize(pattern, base, 0.0)
    except (SingularEdgeError, DomainError):
        return dualize(pattern, base, 0.0, on_singular="infinity")


def _suite_crossratio(pattern, tol):
    if _variant(pattern) in NOT_CROSS_RATIO:
        return [CheckResult("crossratio", "quad residual", None, tol, "not a cross-ratio lattice map")]
    quads = _finite_quads(pattern)
    if not quads:
        return [CheckResult("crossratio", "quad residual", None, tol, "no complete quads")]
    val, skipped = max_quad_residual(pattern, quads)
    note = f"{len(quads) - skipped} quads" + (f", {skipped} with coincident points skipped" if skipped else "")
    return [CheckResult("crossratio", "quad residual", val, tol, note)]


def _suite_constraint(pattern, tol):
    try:
        params = constraint_params_for(pattern)
    except DomainError as e:
        return [CheckResult("constraint", "constraint residual", None, tol, str(e))]
    val, n = max_constraint_residual(pattern, params)
    if not n:
        return [CheckResult("constraint", "constraint residual", None, tol, "no interior points")]
    return [CheckResult("constraint", "constraint residual", val, tol, f"{n} points")]


def _suite_lax(pattern, tol):
    out = []
    if _variant(pattern) in NOT_CROSS_RATIO:
        return [CheckResult("lax", "zero curvature", None, tol, "not a cross-ratio lattice map")]
    val, n = _max_over(lambda q: iv.quad_zero_curvature(pattern, q), _finite_quads(pattern))
    out.append(CheckResult("lax", "zero curvature", val, tol, f"{n} quads"))
    base = _base_point(pattern)
    pts = _sample([p for p in pattern.indices() if pattern.is_finite(p) and p != base], 20)
    val, n = _max_over(lambda p: iv.path_independence(pattern, p, origin=base), pts)
    out.append(CheckResult("lax", "path independence", val, tol, f"{n} points"))
    try:
        dual = dual_of(pattern)
        origin = base if base is not None and dual.is_finite(base) else None
    except DomainError:
        origin = None
    if origin is None:
        out.append(CheckResult("lax", "Sym formula", None, tol / 10, "no finite dual base point"))
    else:
        val, n = _max_over(lambda p: iv.sym_check(pattern, dual, p, origin) if dual.is_finite(p)
                           else _raise_domain(), pts)
        out.append(CheckResult("lax", "Sym formula", val, tol / 10, f"{n} points"))
    return out


def _raise_domain():
    raise DomainError("skip")


def _suite_iso(pattern, tol):
    try:
        params = constraint_params_for(pattern)
    except DomainError as e:
        return [CheckResult("iso", "compatibility", None, tol, str(e))]
    edges = iv.iso_edges(pattern)
    if not edges:
        return [CheckResult("iso", "compatibility", None, tol, "needs a region with full axis neighborhoods")]
    val, n = _max_over(lambda e: iv.iso_compatibility(pattern, params, e), edges)
    return [CheckResult("iso", "compatibility", val, tol, f"{n} edges")]


def _suite_toda(pattern, tol):
    if _variant(pattern) in NOT_CROSS_RATIO:
        return [CheckResult("toda", "hex center", None, tol, "not a cross-ratio lattice map")]
    pts = [p for p in pattern.indices() if pattern.is_finite(p)]
    centers = [p for p in pts if sublattice_class(p) == 0]
    strip_vertices = [p for p in pts if abs(sublattice_class(p)) == 1]
    out = []
    for name, fn, items in (
            ("hex center", iv.toda_hex_residual, centers),
            ("hex vertex", iv.toda_vertex_residual, strip_vertices),
            ("square grid", iv.toda_square_residual, pts)):
        if name == "hex vertex" and _variant(pattern) in NO_CIRCLES:
            out.append(CheckResult("toda", name, None, tol, "odd values are not intersection points"))
            continue
        val, n = _max_over(lambda p, fn=fn: fn(pattern, p), items)
        out.append(CheckResult("toda", name, val, tol, f"{n} points" if n else "no complete stencils"))
    return out


def _suite_conformal(pattern, tol):
    if _variant(pattern) in NO_CIRCLES:
        return [CheckResult("conformal", "S spread", None, tol, "odd values are not intersection points")]
    try:
        ts = compute_TS(pattern, tol=math.inf, skip_degenerate=True)
    except (DomainError, ValueError) as e:
        return [CheckResult("conformal", "S spread", None, tol, str(e))]
    centers = list(ts.centers())
    if not centers:
        return [CheckResult("conformal", "S spread", None, tol, "no complete hexagons")]
    out = [CheckResult("conformal", "S spread", ts.S_spread, tol)]
    val, n = _max_over(lambda c: hexagon_T_residual(ts.hexagon(c)), centers)
    out.append(CheckResult("conformal", "hexagon T equation", val, tol, f"{n} hexagons"))
    val, n = _max_over(lambda c: iv.conformal_lax_residual(ts, c), centers)
    out.append(CheckResult("conformal", "conformal Lax", val, tol, f"{n} hexagons"))
    if _variant(pattern) in ("confsym", "doyle"):
        val, n = _max_over(lambda c: conformal_symmetry_residual(pattern, c), centers)
        out.append(CheckResult("conformal", "multi-ratio + 1", val, tol, f"{n} flowers"))
    return out


def _suite_radii(pattern, tol):
    if not _is_kite(pattern) or "angles" not in pattern.meta:
        return [CheckResult("radii", "flower closure", None, tol, "needs centers and intersection points as values")]
    try:
        r = radii_from_pattern(pattern, tol=1e-7, skip_degenerate=True)
        angles = AngleTriple(*[float(a) for a in pattern.meta["angles"]])
        n = len(list(r.interior()))
        val = max_flower_residual(r, angles)
    except (DomainError, ValueError, KeyError) as e:
        return [CheckResult("radii", "flower closure", math.inf, tol, str(e))]
    if not n:
        return [CheckResult("radii", "flower closure", None, tol, "no complete flowers")]
    return [CheckResult("radii", "flower closure", val, tol, f"{n} flowers")]


_SUITE_FUNCS = {
    "crossratio": _suite_crossratio, "constraint": _suite_constraint, "lax": _suite_lax,
    "iso": _suite_iso, "toda": _suite_toda, "conformal": _suite_conformal, "radii": _suite_radii,
}


def run_suite(pattern: PatternMap, suite: str, tol: float | None = None) -> list[CheckResult]:
    if suite == "all":
        return [r for s in SUITES for r in run_suite(pattern, s, tol)]
    if suite not in _SUITE_FUNCS:
        raise ValueError(f"unknown suite {suite!r}")
    return _SUITE_FUNCS[suite](pattern, DEFAULT_TOLERANCES[suite] if tol is None else tol)


# ---------------------------------------------------------------- CLI

def _complex(ctx, param, value):
    if value is None:
        return None
    try:
        return complex(value.replace(" ", ""))
    except ValueError:
        raise click.BadParameter(f"{value!r} is not a complex number") from None


GENERATE_FLAGS = {
    "zc": {"c", "alpha1", "alpha2", "size", "region"},
    "z2": {"alpha1", "alpha2", "size", "region"},
    "log": {"alpha1", "alpha2", "size", "region"},
    "z3": {"size", "region"},
    "doyle": {"u", "v", "alpha1", "alpha2", "size"},
    "confsym": {"a0", "b0", "c0", "S", "alpha1", "alpha2", "size"},
}
DEFAULT_REGION = {"zc": "sector", "z2": "sector", "log": "sector", "z3": "box"}
DEFAULT_SIZE = {"zc": 8, "z2": 8, "log": 8, "z3": 5, "doyle": 6, "confsym": 3}


def _angles(alpha1, alpha2) -> AngleTriple | None:
    if alpha1 is None and alpha2 is None:
        return None
    if alpha1 is None or alpha2 is None:
        raise click.UsageError("give both --alpha1 and --alpha2 (the third angle is pi minus their sum)")
    try:
        return AngleTriple.from_two(alpha1, alpha2)
    except ValueError as e:
        raise click.UsageError(f"invalid angles: {e}") from None


def generate_pattern(kind: str, **opts) -> PatternMap:
    given = {k for k, v in opts.items() if v is not None}
    extra = given - GENERATE_FLAGS[kind]
    if extra:
        flags = ", ".join("--" + e for e in sorted(extra))
        raise click.UsageError(f"generate {kind} does not take {flags}")
    size = opts.get("size") or DEFAULT_SIZE[kind]
    angles = _angles(opts.get("alpha1"), opts.get("alpha2"))
    region = None
    if kind in DEFAULT_REGION:
        region = Region(opts.get("region") or DEFAULT_REGION[kind], size)
    try:
        if kind == "zc":
            c = opts.get("c")
            if c is None:
                raise click.UsageError("generate zc needs --c")
            if c == 2:
                raise click.UsageError("c = 2 is the degenerate case: use `generate z2`")
            if not 0 < c < 2:
                raise click.UsageError("--c must lie in (0, 2)")
            return build_zc(c, angles, region)
        if kind == "z2":
            return build_z2(angles, region)
        if kind == "log":
            return build_log(region, angles)
        if kind == "z3":
            return build_z3(region)
        if kind == "doyle":
            u, v = opts.get("u"), opts.get("v")
            if u is None or v is None:
                raise click.UsageError("generate doyle needs --u and --v")
            pat = layout_from_radii(doyle_radii(u, v, size), angles)
            return pat.with_values(pat.values, variant="doyle", u=u, v=v)
        a0, b0, c0, S = (opts.get(k) for k in ("a0", "b0", "c0", "S"))
        if a0 is None or b0 is None or c0 is None:
            raise click.UsageError("generate confsym needs --a0, --b0 and --c0")
        if S is not None and angles is not None:
            raise click.UsageError("give either --S or the angles, not both")
        return build_confsym(a0, b0, c0, S=S, angles=angles, size=size)
    except click.UsageError:
        raise
    except ValueError as e:
        raise click.UsageError(str(e)) from None


@click.group()
def cli():
    """Hexagonal circle patterns with constant angles."""


@cli.command()
@click.argument("kind", type=click.Choice(sorted(GENERATE_FLAGS)))
@click.option("--c", "c", type=float, help="exponent for zc, in (0, 2)")
@click.option("--alpha1", type=float, help="intersection angle of family 1 (radians)")
@click.option("--alpha2", type=float, help="intersection angle of family 2 (radians)")
@click.option("--size", type=click.IntRange(1, 40), help="region size")
@click.option("--region", type=click.Choice(REGION_KINDS), help="lattice region kind")
@click.option("--u", type=float, help="Doyle growth along k")
@click.option("--v", type=float, help="Doyle growth along l")
@click.option("--a0", callback=_complex)
@click.option("--b0", callback=_complex)
@click.option("--c0", callback=_complex)
@click.option("--S", "S", callback=_complex, help="vertex cross-ratio for confsym")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def generate(kind, out, **opts):
    """Build a pattern and write it as JSON."""
    pattern = generate_pattern(kind, **opts)
    export_json(pattern, out)
    click.echo(f"wrote {len(pattern)} points to {out}")


def _load(path) -> PatternMap:
    try:
        return import_json(path)
    except (OSError, PatternFormatError) as e:
        raise click.UsageError(f"cannot read {path}: {e}") from None


@cli.command("dualize")
@click.option("--in", "src", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def dualize_cmd(src, out):
    """Write the dual pattern."""
    try:
        dual = dual_of(_load(src))
    except DomainError as e:
        raise click.ClickException(str(e)) from None
    export_json(dual, out)
    click.echo(f"wrote dual to {out}")


@cli.command()
@click.option("--in", "src", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--suite", type=click.Choice(SUITES + ("all",)), default="all", show_default=True)
@click.option("--tol", type=float, help="override every suite tolerance")
def verify(src, suite, tol):
    """Print maximal residuals; exit 1 when one exceeds its tolerance."""
    pattern = _load(src)
    results = run_suite(pattern, suite, tol)
    failed = False
    for r in results:
        val = "-" if r.value is None else f"{r.value:.3e}"
        click.echo(f"{r.status:4}  {r.suite:10}  {r.name:20}  {val:>10}  tol {r.tol:.0e}  {r.note}")
        failed |= r.status == "FAIL"
    sys.exit(1 if failed else 0)


@cli.command()
@click.option("--in", "src", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--stroke-width", type=float)
@click.option("--points/--no-points", default=False, help="mark intersection points")
@click.option("--padding", type=float, default=0.05, show_default=True)
def render(src, out, stroke_width, points, padding):
    """Draw the circles of a pattern as SVG."""
    pattern = _load(src)
    try:
        export_svg(pattern, out, SvgOptions(stroke_width, points, padding))
    except (NoGeometryError, DomainError) as e:
        raise click.ClickException(str(e)) from None
    click.echo(f"wrote {out}")


def cli_main(args: Sequence[str] | None = None) -> int:
    """Run the CLI and return its exit code instead of exiting."""
    try:
        cli.main(args=list(args) if args is not None else None, standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return 2
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        return 1
    except SystemExit as e:
        return int(e.code or 0)
    return 0
