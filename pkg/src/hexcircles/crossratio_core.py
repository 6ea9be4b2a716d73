"""Cross-ratio system on Z^3: targets, propagation and the duality transform."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import mpmath
import numpy as np

from .lattice import Index, Region, step, edge_family
from .projective_complex import INF, CPoint, DomainError, cross_ratio, fourth_point

CONSTRUCTION_TOL = 1e-8
VERIFY_TOL = 1e-10


class PropagationError(RuntimeError):
    def __init__(self, message: str, index: Index | None = None):
        super().__init__(message if index is None else f"{message} at {index}")
        self.index = index


class SingularEdgeError(DomainError):
    pass


@dataclass(frozen=True)
class AngleTriple:
    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        for a in self:
            if not 0.0 < a < math.pi:
                raise ValueError(f"angle {a} outside (0, pi)")
        if abs(self.a1 + self.a2 + self.a3 - math.pi) > 1e-12:
            raise ValueError("angles must sum to pi")

    def __iter__(self):
        return iter((self.a1, self.a2, self.a3))

    def __getitem__(self, n: int) -> float:
        """1-based access, cyclic: angle(4) == angle(1)."""
        return (self.a1, self.a2, self.a3)[(n - 1) % 3]

    @classmethod
    def from_two(cls, a1: float, a2: float) -> "AngleTriple":
        return cls(a1, a2, math.pi - a1 - a2)

    @classmethod
    def isotropic(cls) -> "AngleTriple":
        return cls.from_two(math.pi / 3, math.pi / 3)

    @property
    def is_isotropic(self) -> bool:
        return all(abs(a - math.pi / 3) < 1e-12 for a in self)


Deltas = tuple[complex, complex, complex]


def angles_to_deltas(angles: AngleTriple) -> Deltas:
    """Edge constants with phases 0, 2*a3, -2*a2, so Delta_{n+1}/Delta_{n+2} = exp(2i a_n)."""
    phases = (0.0, 2 * angles.a3, -2 * angles.a2)
    return tuple(complex(np.exp(-1j * d)) for d in phases)


def quad_target(deltas: Deltas, families: tuple[int, int]) -> complex:
    """Cross-ratio of (x, x+e_i, x+e_i+e_j, x+e_j) for families (i, j): Delta_i / Delta_j."""
    i, j = families
    if i == j or {i, j} - {1, 2, 3}:
        raise ValueError("need two distinct families in 1..3")
    return deltas[i - 1] / deltas[j - 1]


def quad_target_for(deltas: Deltas, quad: tuple[Index, Index, Index, Index]) -> complex:
    """Target cross-ratio of a lattice quadrilateral given in any cyclic order."""
    low = tuple(min(c) for c in zip(*quad))
    fams = sorted({edge_family(quad[0], quad[1]), edge_family(quad[1], quad[2])})
    if len(fams) != 2:
        raise ValueError(f"{quad} is not an elementary quadrilateral")
    i, j = fams
    r = quad.index(low)
    t = quad_target(deltas, (i, j))
    power = -1 if r % 2 else 1
    if quad[(r + 1) % 4] != step(low, i):
        power = -power
    return t if power == 1 else 1 / t


@dataclass(frozen=True, eq=False)
class PatternMap:
    """Values of a lattice map on a finite region, with its edge constants."""

    region: Region
    values: Mapping[Index, CPoint]
    deltas: Deltas
    meta: Mapping = field(default_factory=dict)

    def __getitem__(self, p: Index) -> CPoint:
        return self.values[p]

    def __contains__(self, p: Index) -> bool:
        return p in self.values

    def __len__(self) -> int:
        return len(self.values)

    def indices(self) -> list[Index]:
        return sorted(self.values)

    def z(self, p: Index) -> complex:
        return self.values[p].to_complex()

    def is_finite(self, p: Index) -> bool:
        return p in self.values and not self.values[p].is_infinite

    def restrict(self, region: Region) -> "PatternMap":
        vals = {p: v for p, v in self.values.items() if p in region}
        return PatternMap(region, vals, self.deltas, dict(self.meta))

    def with_values(self, values: Mapping[Index, CPoint], **meta) -> "PatternMap":
        m = dict(self.meta)
        m.update(meta)
        return PatternMap(self.region, dict(values), self.deltas, m)


def pattern_from_function(fn, region: Region, deltas: Deltas, **meta) -> PatternMap:
    vals = {p: CPoint.of(fn(p)) for p in region.indices()}
    return PatternMap(region, vals, tuple(complex(d) for d in deltas), meta)


def quad_residual(pattern: PatternMap, quad) -> float:
    """Chordal distance between the measured cross-ratio and its target."""
    missing = [p for p in quad if p not in pattern]
    if missing:
        raise KeyError(f"quadrilateral corners {missing} not in pattern")
    q = cross_ratio(*(pattern[p] for p in quad))
    return q.distance(CPoint.of(quad_target_for(pattern.deltas, quad)))


def max_quad_residual(pattern: PatternMap, quads: Iterable) -> tuple[float, int]:
    """Worst residual over quads that are evaluable; also returns the skipped count."""
    worst, skipped = 0.0, 0
    for quad in quads:
        if any(p not in pattern for p in quad):
            skipped += 1
            continue
        try:
            worst = max(worst, quad_residual(pattern, quad))
        except DomainError:
            skipped += 1
    return worst, skipped


def eighth_point(z_p, z_k, z_l, z_m, q1, q2, q3, tol: float = 1e-10):
    """Complete the hexahedron p + (a, b, -c) from z_p, z_{p+e1}, z_{p+e2}, z_{p-e3}.

    q1, q2, q3 are the cross-ratios of the face pairs spanned by (e2, -e3),
    (e1, -e3) and (e1, e2).  Returns (corners, value, disagreement) where
    corners maps offsets (a, b, -c) to points and disagreement is the largest
    chordal spread among the three face computations of the last corner.
    """
    if abs(q1 * q2 * q3 - 1) > tol:
        raise DomainError("face cross-ratios must multiply to 1")
    c = {(0, 0, 0): CPoint.of(z_p), (1, 0, 0): CPoint.of(z_k),
         (0, 1, 0): CPoint.of(z_l), (0, 0, -1): CPoint.of(z_m)}
    c[(0, 1, -1)] = fourth_point(q1, [c[(0, 0, 0)], c[(0, 0, -1)], c[(0, 1, 0)]], 3)
    c[(1, 0, -1)] = fourth_point(q2, [c[(0, 0, 0)], c[(1, 0, 0)], c[(0, 0, -1)]], 3)
    c[(1, 1, 0)] = fourth_point(q3, [c[(0, 0, 0)], c[(0, 1, 0)], c[(1, 0, 0)]], 3)
    cands = [
        fourth_point(q1, [c[(1, 0, 0)], c[(1, 0, -1)], c[(1, 1, 0)]], 3),
        fourth_point(q2, [c[(0, 1, 0)], c[(1, 1, 0)], c[(0, 1, -1)]], 3),
        fourth_point(q3, [c[(0, 0, -1)], c[(0, 1, -1)], c[(1, 0, -1)]], 3),
    ]
    spread = max(a.distance(b) for a in cands for b in cands)
    c[(1, 1, -1)] = cands[0]
    return c, cands[0], spread


HP_DIGITS = 40


def to_hp(z) -> tuple:
    """Homogeneous pair of mpmath numbers for a CPoint, complex, mpc or None (infinity)."""
    if isinstance(z, CPoint):
        return (mpmath.mpc(z.a), mpmath.mpc(z.b))
    if isinstance(z, tuple):
        return z
    if z is None:
        return (mpmath.mpc(1), mpmath.mpc(0))
    return (mpmath.mpc(z), mpmath.mpc(1))


def from_hp(h: tuple) -> CPoint:
    a, b = h
    if b != 0:
        # round the affine value once so finite points are correctly rounded
        return CPoint.of(complex(a / b))
    s = max(abs(a), abs(b))
    return CPoint(complex(a / s), complex(b / s))


def _hp_det(p, q):
    return p[0] * q[1] - q[0] * p[1]


def _hp_dist(p, q):
    n = mpmath.sqrt(abs(p[0]) ** 2 + abs(p[1]) ** 2) * mpmath.sqrt(abs(q[0]) ** 2 + abs(q[1]) ** 2)
    return float(abs(_hp_det(p, q)) / n)


def _hp_fourth(q, p1, p2, p3):
    """Same linear solve as fourth_point for slot 3 of (p1, p2, ., p3)."""
    # q(z1,z2,z3,z4) = q(z2,z1,z4,z3): the unknown goes last after (p2, p1, p3)
    u = _hp_det(p1, p2)
    v = q * _hp_det(p3, p1)
    a = u * p3[0] + v * p2[0]
    b = u * p3[1] + v * p2[1]
    s = max(abs(a), abs(b))
    if s == 0:
        raise DomainError("fourth point undetermined for this configuration")
    return (a / s, b / s)


def propagate(seeds: Mapping[Index, object], deltas, size: int,
              signs: tuple[int, int, int] = (1, 1, -1), order: str = "lex",
              tol: float = CONSTRUCTION_TOL, digits: int = HP_DIGITS) -> tuple[dict[Index, CPoint], float]:
    """Fill the Z^3 octant {signs[i] * p[i] >= 0} up to `size` from axis data.

    Every point with at least two nonzero coordinates that is not already
    seeded is obtained from the faces through it whose other corners are known
    earlier.  Points with three nonzero coordinates are computed from all three
    faces of their hexahedron; the largest chordal disagreement is returned.
    The Cauchy problem amplifies rounding errors geometrically with the
    distance from the axes, so the sweep runs with `digits` significant
    decimal digits (mpmath) and rounds to double only at the end.
    """
    with mpmath.workdps(digits):
        dl = tuple(mpmath.mpc(d) for d in deltas)
        vals = {p: to_hp(v) for p, v in seeds.items()}
        r = range(size + 1)
        octant = [(a, b, c) for a in r for b in r for c in r]
        if order == "lex":
            octant.sort()
        elif order == "reverse":
            octant.sort(key=lambda t: (t[2], t[1], t[0]))
        else:
            raise ValueError("order must be 'lex' or 'reverse'")
        worst = 0.0
        for a, b, c in octant:
            p = (signs[0] * a, signs[1] * b, signs[2] * c)
            nz = [n for n, t in zip((1, 2, 3), (a, b, c)) if t != 0]
            if len(nz) < 2:
                if p not in vals:
                    raise PropagationError("missing axis value", p)
                continue
            if p in vals:
                continue
            cands = []
            for i in nz:
                for j in nz:
                    if i >= j:
                        continue
                    back_i = step(p, i, -signs[i - 1])
                    back_j = step(p, j, -signs[j - 1])
                    corner = step(back_i, j, -signs[j - 1])
                    q = quad_target_for(dl, (corner, back_j, p, back_i))
                    try:
                        cands.append(_hp_fourth(q, vals[corner], vals[back_j], vals[back_i]))
                    except DomainError:
                        continue
            if not cands:
                raise PropagationError("no usable face to determine point", p)
            spread = max(_hp_dist(x, y) for x in cands for y in cands)
            if spread > tol:
                raise PropagationError(f"face computations disagree by {spread:.3g}", p)
            worst = max(worst, spread)
            vals[p] = cands[0]
        return {p: from_hp(v) for p, v in vals.items()}, worst


def _pattern_edges(pattern: PatternMap):
    for p in pattern.values:
        for n in (1, 2, 3):
            q = step(p, n)
            if q in pattern.values:
                yield p, q, n


def dualize(pattern: PatternMap, base: Index | None = None, base_value=0.0,
            on_singular: str = "error", tol: float = CONSTRUCTION_TOL) -> PatternMap:
    """Dual map with (z_in - z_out)(z*_in - z*_out) = Delta_n on every family-n edge.

    Integrated along a breadth-first spanning tree from `base`; every edge is
    checked afterwards.  Edges with coincident endpoints raise
    SingularEdgeError, or with on_singular="infinity" are removed and vertices
    cut off by them are sent to infinity.  An edge meeting infinity has dual
    length zero.
    """
    if on_singular not in ("error", "infinity"):
        raise ValueError("on_singular must be 'error' or 'infinity'")
    if base is None:
        base = (1, 0, 0) if (1, 0, 0) in pattern else min(pattern.values)
    if base not in pattern:
        raise KeyError(f"base {base} not in pattern")
    deltas = pattern.deltas
    adj: dict[Index, list[tuple[Index, complex]]] = {p: [] for p in pattern.values}
    singular = 0
    for p, q, n in _pattern_edges(pattern):
        zp, zq = pattern[p], pattern[q]
        if zp.is_infinite and zq.is_infinite:
            raise SingularEdgeError(f"edge {p}-{q} has both ends at infinity")
        if zp.is_infinite or zq.is_infinite:
            d = 0j
        else:
            diff = zq.to_complex() - zp.to_complex()
            if diff == 0 or abs(diff) < 1e-300:
                if on_singular == "error":
                    raise SingularEdgeError(f"edge {p}-{q} has coincident endpoints")
                singular += 1
                continue
            d = deltas[n - 1] / diff
        adj[p].append((q, d))
        adj[q].append((p, -d))
    dual: dict[Index, complex] = {base: complex(CPoint.of(base_value).to_complex())}
    queue = deque([base])
    while queue:
        p = queue.popleft()
        for q, d in adj[p]:
            if q not in dual:
                dual[q] = dual[p] + d
                queue.append(q)
    closure = 0.0
    for p in adj:
        for q, d in adj[p]:
            if p in dual and q in dual:
                err = abs(dual[q] - dual[p] - d) / max(1.0, abs(d))
                closure = max(closure, err)
    if closure > tol:
        raise DomainError(f"dual closure residual {closure:.3g} exceeds {tol:g}")
    vals = {}
    for p in pattern.values:
        if p in dual:
            vals[p] = CPoint.of(dual[p])
        elif on_singular == "infinity":
            vals[p] = INF
        else:
            raise DomainError(f"vertex {p} not connected to base")
    meta = dict(pattern.meta)
    variant = meta.get("variant", "pattern")
    meta["dual_of"] = variant
    # z^2 and log z are each other's duals
    meta["variant"] = {"z2": "log", "log": "z2"}.get(variant, variant)
    meta["dual_closure"] = closure
    if meta.get("c") is not None:
        meta["c"] = 2 - meta["c"]
    return PatternMap(pattern.region, vals, deltas, meta)
