"""Radius functions, layouts, Doyle patterns and the conformal T/S description.

Hexagon and vertex conventions used throughout:

* the six intersection points of the circle with center index c are
  ``flower(c).vertices`` (counterclockwise from c + e1);
* an intersection-lattice edge joins a point v with k+l+m = 1 to a point
  w = v + e_n - (1, 1, 1); the edge is in family n and is stored as (v, w);
* the three neighbors of an intersection point are listed by family.
"""

from __future__ import annotations

import cmath
import math
from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Iterator

import mpmath

from .crossratio_core import (
    CONSTRUCTION_TOL, AngleTriple, PatternMap, angles_to_deltas, from_hp, to_hp)
from .lattice import (
    VERTEX_OFFSETS, Index, Region, add, flower, sublattice_class)
from .projective_complex import CPoint, DomainError, cross_ratio, multi_ratio


class NotLayableError(ValueError):
    """The radii do not close up around some flower."""


class DegenerateLayoutError(ValueError):
    pass


class NotConstantAngleError(ValueError):
    """Measured T or S data is inconsistent with a constant-angle pattern."""


class RadiiMismatchError(ValueError):
    pass


# intersection angle carried by petal j of a flower, as an index into the angle triple
PETAL_FAMILY = (2, 1, 3, 2, 1, 3)


class RadiusFunction(Mapping):
    """Positive radii on circle-center indices (k + l + m = 0)."""

    def __init__(self, radii: Mapping[Index, float]):
        data = {}
        for p, r in radii.items():
            p = tuple(int(t) for t in p)
            if sublattice_class(p) != 0:
                raise ValueError(f"radius given at non-center index {p}")
            r = float(r)
            if not r > 0 or not math.isfinite(r):
                raise ValueError(f"radius at {p} must be positive and finite")
            data[p] = r
        self._data = data

    def __getitem__(self, p: Index) -> float:
        return self._data[p]

    def __iter__(self) -> Iterator[Index]:
        return iter(sorted(self._data))

    def __len__(self) -> int:
        return len(self._data)

    def petal_ratios(self, center: Index) -> tuple[float, ...]:
        r = self._data[center]
        return tuple(self._data[q] / r for q in flower(center).petals)

    def interior(self) -> list[Index]:
        """Centers whose six petals all carry radii."""
        return [c for c in self if all(q in self._data for q in flower(c).petals)]


def center_indices(size: int) -> list[Index]:
    r = range(-size, size + 1)
    return [(k, l, -k - l) for k in r for l in r if abs(k + l) <= size]


def _half_turn(ratio: float, alpha: float) -> float:
    # angle at the center between an intersection point and the petal center
    return cmath.phase(1 + ratio * cmath.exp(1j * alpha))


def flower_residual(r: Mapping[Index, float], center: Index, angles: AngleTriple) -> float:
    """Angle defect of the flower at `center`: zero exactly when it closes up."""
    fl = flower(center)
    missing = [q for q in (center, *fl.petals) if q not in r]
    if missing:
        raise KeyError(f"flower at {center} lacks radii at {missing}")
    rc = r[center]
    total = sum(_half_turn(r[q] / rc, angles[PETAL_FAMILY[j]]) for j, q in enumerate(fl.petals))
    return total - math.pi


def max_flower_residual(r: RadiusFunction, angles: AngleTriple) -> float:
    return max((abs(flower_residual(r, c, angles)) for c in r.interior()), default=0.0)


def dual_radii(r: Mapping[Index, float]) -> RadiusFunction:
    return RadiusFunction({p: 1.0 / v for p, v in r.items()})


def doyle_radii(u: float, v: float, size: int = 6) -> RadiusFunction:
    """Log-linear radii exp(u k + v l - (u + v) m) on the centers within `size`."""
    return RadiusFunction({p: math.exp(u * p[0] + v * p[1] - (u + v) * p[2])
                           for p in center_indices(size)})


def doyle_identities(r: Mapping[Index, float], center: Index) -> float:
    """Largest relative defect of R_j R_{j+3} = 1 and R_j R_{j+2} R_{j+4} = 1 (ratios to the center)."""
    rc = r[center]
    ratios = [r[q] / rc for q in flower(center).petals]
    worst = 0.0
    for j in range(6):
        worst = max(worst, abs(ratios[j] * ratios[(j + 3) % 6] - 1))
        worst = max(worst, abs(ratios[j] * ratios[(j + 2) % 6] * ratios[(j + 4) % 6] - 1))
    return worst


def _strip_region(indices) -> Region:
    size = max((max(abs(t) for t in p) for p in indices), default=1)
    return Region("strip", max(size, 1))


def layout_from_radii(r: RadiusFunction, angles: AngleTriple | None = None,
                      start: Index | None = None, origin: complex = 0j, direction: float = 0.0,
                      tol: float = CONSTRUCTION_TOL) -> PatternMap:
    """Euclidean centers and intersection points realizing the radii.

    The `start` circle (default: the center nearest the origin index) is put at
    `origin` and its first petal in direction `direction`.  Adjacent circles
    sit at distance sqrt(r^2 + r'^2 + 2 r r' cos a).
    """
    angles = angles or AngleTriple.isotropic()
    if not len(r):
        raise ValueError("empty radius function")
    for c in r.interior():
        defect = flower_residual(r, c, angles)
        if abs(defect) > tol:
            raise NotLayableError(f"flower at {c} does not close (defect {defect:.3g})")
    if start is None:
        start = min(r, key=lambda p: (sum(t * t for t in p), p))
    pos: dict[Index, complex] = {}
    worst = 0.0

    def put(p: Index, z: complex) -> None:
        nonlocal worst
        if p in pos:
            err = abs(pos[p] - z)
            scale = max(1.0, abs(z))
            if err > tol * scale:
                raise DegenerateLayoutError(f"layout disagrees at {p} by {err:.3g}")
            worst = max(worst, err / scale)
        else:
            pos[p] = z

    rc = r[start]
    first = _half_turn(r[flower(start).petals[0]] / rc, angles[PETAL_FAMILY[0]]) \
        if flower(start).petals[0] in r else 0.0
    put(start, origin)
    put(add(start, VERTEX_OFFSETS[0]), origin + rc * cmath.exp(1j * (direction - first)))
    queue = deque([start])
    seen = {start}
    while queue:
        c = queue.popleft()
        fl = flower(c)
        rc = r[c]
        zc = pos[c]
        known = [j for j, v in enumerate(fl.vertices) if v in pos]
        if not known:
            continue
        for sense in (1, -1):
            j = known[0]
            theta = cmath.phase(pos[fl.vertices[j]] - zc)
            for _ in range(6):
                petal = j if sense == 1 else (j - 1) % 6
                q = fl.petals[petal]
                if q not in r:
                    break
                spoke = 1 + r[q] / rc * cmath.exp(1j * angles[PETAL_FAMILY[petal]])
                if sense == -1:
                    theta -= 2 * cmath.phase(spoke)
                put(q, zc + rc * cmath.exp(1j * theta) * spoke)
                if sense == 1:
                    theta += 2 * cmath.phase(spoke)
                j = (j + sense) % 6
                put(fl.vertices[j], zc + rc * cmath.exp(1j * theta))
                if q not in seen:
                    seen.add(q)
                    queue.append(q)
    values = {p: CPoint.of(z) for p, z in pos.items()}
    meta = {"variant": "layout", "angles": tuple(angles), "layout_closure": worst}
    return PatternMap(_strip_region(values), values, angles_to_deltas(angles), meta)


def radii_from_pattern(pattern: PatternMap, tol: float = 1e-7,
                       skip_degenerate: bool = False) -> RadiusFunction:
    """Radii read off as distances from each center value to its intersection points.

    With `skip_degenerate`, circles shrunk to a point (as at the origin of z^2) are left out.
    """
    out = {}
    for c in pattern.indices():
        if sublattice_class(c) != 0 or not pattern.is_finite(c):
            continue
        zc = pattern.z(c)
        ds = [abs(pattern.z(v) - zc) for v in flower(c).vertices if pattern.is_finite(v)]
        if not ds:
            continue
        r = max(ds)
        if skip_degenerate and r <= 1e-12 * max(1.0, abs(zc)):
            continue
        if r - min(ds) > tol * max(1.0, r):
            raise RadiiMismatchError(f"neighbor distances at {c} spread by {r - min(ds):.3g}")
        out[c] = sum(ds) / len(ds)
    return RadiusFunction(out)


# ---------------------------------------------------------------- conformal data

HLEdge = tuple[Index, Index]


def hl_neighbor(v: Index, family: int) -> Index:
    """Neighbor of an intersection point across an edge of the given family."""
    s = sublattice_class(v)
    if s not in (1, -1):
        raise ValueError(f"{v} is not an intersection-point index")
    shift = [0, 0, 0]
    shift[family - 1] = s
    return tuple(v[i] + shift[i] - s for i in range(3))


def hl_edge(a: Index, b: Index) -> HLEdge:
    """Canonical key (plus point first) for the edge between two intersection points."""
    return (a, b) if sublattice_class(a) == 1 else (b, a)


def hl_edge_family(edge: HLEdge) -> int:
    v, w = edge
    d = [w[i] - v[i] + 1 for i in range(3)]
    if sorted(d) != [0, 0, 1] or sublattice_class(v) != 1:
        raise ValueError(f"{edge} is not an intersection-lattice edge")
    return d.index(1) + 1


def hexagon_edges(center: Index) -> list[HLEdge]:
    vs = flower(center).vertices
    return [hl_edge(vs[i % 6], vs[(i + 1) % 6]) for i in range(1, 7)]


def hexagon_T(values: Mapping[Index, CPoint], center: Index) -> list[complex] | None:
    """T_1..T_6 of the hexagon, T_i = q(w_i, w_{i+1}, w_{i+2}, w_{i-1}) on edge [w_i, w_{i+1}]."""
    vs = flower(center).vertices
    if not all(v in values for v in vs):
        return None
    w = [values[v] for v in vs]
    return [cross_ratio(w[i % 6], w[(i + 1) % 6], w[(i + 2) % 6], w[(i - 1) % 6]).to_complex()
            for i in range(1, 7)]


def vertex_S(values: Mapping[Index, CPoint], v: Index, i: int = 1) -> complex | None:
    """S^(i) at an intersection point, q(w_i, w_{i-1}, w, w_{i-2}) with w_n across family n."""
    nb = [hl_neighbor(v, n) for n in (1, 2, 3)]
    if v not in values or not all(x in values for x in nb):
        return None
    w = [values[x] for x in nb]
    return cross_ratio(w[(i - 1) % 3], w[(i - 2) % 3], values[v], w[(i - 3) % 3]).to_complex()


def circle_S(angles: AngleTriple, i: int = 1) -> complex:
    """Closed form of S^(i) for a pattern with the given intersection angles."""
    return cmath.exp(-1j * angles[i]) * math.sin(angles[i + 1]) / math.sin(angles[i + 2])


@dataclass
class TSData:
    T: dict[HLEdge, complex]
    S: complex
    T_mismatch: float = 0.0
    S_spread: float = 0.0
    meta: dict = field(default_factory=dict)

    def hexagon(self, center: Index) -> list[complex] | None:
        es = hexagon_edges(center)
        if not all(e in self.T for e in es):
            return None
        return [self.T[e] for e in es]

    def centers(self) -> list[Index]:
        cands = set()
        for v, w in self.T:
            for p in (v, w):
                for d in VERTEX_OFFSETS:
                    c = (p[0] - d[0], p[1] - d[1], p[2] - d[2])
                    if sublattice_class(c) == 0:
                        cands.add(c)
        return sorted(c for c in cands if self.hexagon(c) is not None)


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


def compute_TS(pattern: PatternMap, tol: float = CONSTRUCTION_TOL,
               skip_degenerate: bool = False) -> TSData:
    """T on every intersection-lattice edge and the common S^(1) of the intersection points.

    With `skip_degenerate`, hexagons and vertices whose cross-ratios are
    undefined (coincident points) are left out instead of raising.
    """
    vals = {p: v for p, v in pattern.values.items() if sublattice_class(p) in (1, -1)}
    centers = sorted({add(v, (-d[0], -d[1], -d[2])) for v in vals for d in VERTEX_OFFSETS
                      if sublattice_class(v) == sublattice_class(d)})
    T: dict[HLEdge, complex] = {}
    mismatch = 0.0
    skipped = 0

    def guarded(fn, *args):
        nonlocal skipped
        if not skip_degenerate:
            return fn(*args)
        try:
            out = fn(*args)
        except DomainError:
            skipped += 1
            return None
        items = out if isinstance(out, list) else [out]
        if out is not None and not all(t != 0 and cmath.isfinite(t) for t in items):
            skipped += 1
            return None
        return out

    for c in centers:
        ts = guarded(hexagon_T, vals, c)
        if ts is None:
            continue
        for e, t in zip(hexagon_edges(c), ts):
            if e in T:
                mismatch = max(mismatch, _rel(T[e], t))
            else:
                T[e] = t
    if mismatch > tol:
        raise NotConstantAngleError(f"T differs across an edge by {mismatch:.3g}")
    Ss = [s for v in sorted(vals) if (s := guarded(vertex_S, vals, v)) is not None]
    if not Ss:
        raise ValueError("no intersection point with all three neighbors")
    S = Ss[0]
    spread = max(_rel(S, s) for s in Ss)
    if spread > tol:
        raise NotConstantAngleError(f"S^(1) varies by {spread:.3g}")
    return TSData(T, S, mismatch, spread, {"edges": len(T), "vertices": len(Ss), "skipped": skipped})


def hexagon_T_residual(T: list[complex]) -> float:
    """Largest disagreement among T1/T4, T3/T6, T5/T2 and (T1+T3-1-T1T2T3)/(1-T2)."""
    T1, T2, T3, T4, T5, T6 = T
    if T2 == 1:
        raise DomainError("T2 = 1 makes the hexagon relation singular")
    vals = [T1 / T4, T3 / T6, T5 / T2, (T1 + T3 - 1 - T1 * T2 * T3) / (1 - T2)]
    return max(abs(a - b) for a in vals for b in vals)


def angles_from_S(S: complex) -> AngleTriple:
    """Intersection angles of the pattern whose S^(1) is S (inverse of circle_S)."""
    S = complex(S)
    if S == 0 or S == 1 or S.imag == 0:
        raise DomainError(f"S = {S} does not determine intersection angles")
    Sb = S.conjugate()
    a1 = (cmath.phase(Sb / S) / 2) % math.pi
    a2 = (cmath.phase((1 - S) / (1 - Sb)) / 2) % math.pi
    try:
        return AngleTriple(a1, a2, math.pi - a1 - a2)
    except ValueError as exc:
        raise DomainError(f"S = {S} gives no admissible angle triple") from exc


# ---------------------------------------------------------------- reconstruction

def _hp_last(q, p1, p2, p3):
    u = q[1] * (p2[0] * p1[1] - p1[0] * p2[1])
    v = q[0] * (p3[0] * p2[1] - p2[0] * p3[1])
    a = u * p3[0] + v * p1[0]
    b = u * p3[1] + v * p1[1]
    s = max(abs(a), abs(b))
    if s == 0:
        raise DomainError("fourth point undetermined for this configuration")
    return (a / s, b / s)


def _hp_solve(q, pts: list, slot: int):
    """Point at `slot` (0..3) of a cross-ratio q given the other three in order."""
    p = [x for x in pts]
    if slot == 3:
        return _hp_last(q, p[0], p[1], p[2])
    if slot == 2:
        return _hp_last(q, p[1], p[0], p[2])
    if slot == 1:
        return _hp_last(q, p[1], p[2], p[0])
    return _hp_last(q, p[2], p[1], p[0])


def default_seeds(region: Region) -> dict[Index, complex]:
    """Three neighbors of the intersection point nearest the origin, sent to 0, 1 and i."""
    pts = set(region.indices())
    cands = [v for v in pts if sublattice_class(v) == 1
             and all(hl_neighbor(v, n) in pts for n in (1, 2, 3))]
    if not cands:
        raise ValueError("region holds no intersection point with all its neighbors")
    v = min(cands, key=lambda p: (sum(t * t for t in p), p))
    return dict(zip((hl_neighbor(v, n) for n in (1, 2, 3)), (0j, 1 + 0j, 1j)))


def reconstruct_from_TS(ts: TSData, region: Region, seeds: Mapping[Index, object] | None = None,
                        digits: int = 40, tol: float = CONSTRUCTION_TOL) -> PatternMap:
    """Intersection points with the given T's and S^(1), fixed by three seed values.

    Hexagon cross-ratios and vertex cross-ratios are applied wherever three of
    their four points are known, until nothing changes.  Points determined more
    than once are checked against each other.
    """
    if seeds is None:
        seeds = default_seeds(region)
    if len(seeds) != 3:
        raise ValueError("exactly three seed points fix the Mobius freedom")
    targets = {p for p in region.indices() if sublattice_class(p) in (1, -1)}
    for p in seeds:
        if p not in targets:
            raise ValueError(f"seed {p} is not an intersection point of the region")
    centers = sorted({add(v, (-d[0], -d[1], -d[2])) for v in targets for d in VERTEX_OFFSETS
                      if sublattice_class(v) == sublattice_class(d)})
    worst = 0.0
    with mpmath.workdps(digits):
        vals = {p: to_hp(CPoint.of(z)) for p, z in seeds.items()}
        S = mpmath.mpc(ts.S)
        s_hp = (S, mpmath.mpc(1))
        relations: list[tuple[tuple, list[Index]]] = []
        for c in centers:
            vs = flower(c).vertices
            for i in range(1, 7):
                e = hl_edge(vs[i % 6], vs[(i + 1) % 6])
                quad = [vs[i % 6], vs[(i + 1) % 6], vs[(i + 2) % 6], vs[(i - 1) % 6]]
                if e in ts.T and all(p in targets for p in quad):
                    relations.append(((mpmath.mpc(ts.T[e]), mpmath.mpc(1)), quad))
        for v in sorted(targets):
            if sublattice_class(v) != 1 and sublattice_class(v) != -1:
                continue
            nb = [hl_neighbor(v, n) for n in (1, 2, 3)]
            quad = [nb[0], nb[2], v, nb[1]]
            if all(p in targets for p in quad):
                relations.append((s_hp, quad))
        by_point: dict[Index, list[int]] = {}
        for k, (_, quad) in enumerate(relations):
            for p in quad:
                by_point.setdefault(p, []).append(k)
        pending = deque(range(len(relations)))
        queued = set(pending)
        while pending:
            k = pending.popleft()
            queued.discard(k)
            q, quad = relations[k]
            unknown = [i for i, p in enumerate(quad) if p not in vals]
            if len(unknown) != 1:
                if not unknown:
                    worst = max(worst, _hp_relation_defect(q, [vals[p] for p in quad]))
                continue
            slot = unknown[0]
            known = [vals[p] for i, p in enumerate(quad) if i != slot]
            try:
                vals[quad[slot]] = _hp_solve(q, known, slot)
            except DomainError as exc:
                raise NotConstantAngleError(f"singular configuration near {quad[slot]}") from exc
            for k2 in by_point[quad[slot]]:
                if k2 not in queued:
                    queued.add(k2)
                    pending.append(k2)
        out = {p: from_hp(v) for p, v in vals.items()}
    if worst > tol:
        raise NotConstantAngleError(f"T/S data is inconsistent (defect {worst:.3g})")
    angles = None
    try:
        angles = tuple(angles_from_S(ts.S))
    except (DomainError, ValueError):
        pass
    deltas = angles_to_deltas(AngleTriple(*angles)) if angles else (1, 1, 1)
    meta = {"variant": "reconstructed", "S": ts.S, "angles": angles, "relation_defect": worst,
            "missing": len(targets) - len(out)}
    return PatternMap(region, out, deltas, meta)


def _hp_relation_defect(q, pts) -> float:
    p1, p2, p3, p4 = pts
    num = (p2[0] * p1[1] - p1[0] * p2[1]) * (p4[0] * p3[1] - p3[0] * p4[1])
    den = (p3[0] * p2[1] - p2[0] * p3[1]) * (p1[0] * p4[1] - p4[0] * p1[1])
    lhs = q[1] * num - q[0] * den
    scale = max(abs(q[0]), abs(q[1])) * max(abs(num), abs(den))
    if scale == 0:
        return 0.0
    return float(abs(lhs) / scale)


# ---------------------------------------------------------------- conformal symmetry

@dataclass(frozen=True)
class ABCSolution:
    """R-values a_k, b_l, c_m on the three edge families, linear in the label."""

    a0: complex
    b0: complex
    c0: complex

    @property
    def delta(self) -> complex:
        return 1 - self.a0 - self.b0 - self.c0

    def value(self, family: int, label: int) -> complex:
        base = (self.a0, self.b0, self.c0)[family - 1]
        return base + label * self.delta


# label shift per family so that three consecutive edges of a hexagon sum to 1
ABC_LABEL_SHIFT = (1, 0, 0)


def abc_label(edge: HLEdge) -> tuple[int, int]:
    n = hl_edge_family(edge)
    return n, edge[0][n - 1] + ABC_LABEL_SHIFT[n - 1]


def abc_T(sol: ABCSolution, edge: HLEdge) -> complex:
    n, label = abc_label(edge)
    R = sol.value(n, label)
    if R == 0:
        raise DomainError(f"R vanishes on {edge}")
    return 1 - 1 / R


def R_of_T(T: complex) -> complex:
    return 1 / (1 - T)


def hl_edges(region: Region) -> list[HLEdge]:
    pts = set(region.indices())
    return [(v, hl_neighbor(v, n)) for v in sorted(pts) if sublattice_class(v) == 1
            for n in (1, 2, 3) if hl_neighbor(v, n) in pts]


def build_confsym(a0: complex, b0: complex, c0: complex, S: complex | None = None,
                  angles: AngleTriple | None = None, size: int = 3) -> PatternMap:
    """Conformally symmetric pattern on the strip of the given size."""
    if S is None:
        S = circle_S(angles or AngleTriple.isotropic())
    sol = ABCSolution(complex(a0), complex(b0), complex(c0))
    region = Region("strip", size)
    T = {e: abc_T(sol, e) for e in hl_edges(region)}
    pat = reconstruct_from_TS(TSData(T, complex(S)), region)
    meta = dict(pat.meta)
    meta.update(variant="confsym", abc=(sol.a0, sol.b0, sol.c0))
    return PatternMap(region, pat.values, pat.deltas, meta)


def conformal_symmetry_residual(pattern: PatternMap, center: Index) -> float:
    """|m(w_1..w_6) + 1| for the six intersection points on the circle at `center`."""
    vs = flower(center).vertices
    missing = [v for v in vs if v not in pattern]
    if missing:
        raise KeyError(f"flower at {center} lacks points {missing}")
    m = multi_ratio([pattern[v] for v in vs])
    return math.inf if m.is_infinite else abs(m.to_complex() + 1)


def abc_residual(pattern: PatternMap, sol: ABCSolution | None = None) -> float:
    """Worst defect of a + b + c = 1 over hexagons (and of R = a_k etc. when `sol` is given)."""
    ts = compute_TS(pattern, tol=math.inf)
    worst = 0.0
    for c in ts.centers():
        es = hexagon_edges(c)
        R = [R_of_T(ts.T[e]) for e in es]
        for i in range(6):
            worst = max(worst, abs(R[i] + R[(i + 1) % 6] + R[(i + 2) % 6] - 1))
    if sol is not None:
        for e, t in ts.T.items():
            n, label = abc_label(e)
            worst = max(worst, abs(R_of_T(t) - sol.value(n, label)))
    return worst
