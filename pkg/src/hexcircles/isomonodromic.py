"""The non-autonomous constraint and the builders for z^c, z^2, log z and z^3."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath

from .crossratio_core import (AngleTriple, Deltas, PatternMap,
                              angles_to_deltas, dualize, propagate, CONSTRUCTION_TOL,
                              HP_DIGITS)
from .lattice import OMEGA, Index, Region, embed_reference, step
from .projective_complex import CPoint, DomainError


class SingularStepError(DomainError):
    pass


@dataclass(frozen=True)
class ConstraintParams:
    """b z^2 + c z + d = sum_n 2 (p_n - a_n) (z_+ - z)(z - z_-) / (z_+ - z_-)."""

    b: complex = 0
    c: complex = 0
    d: complex = 0
    a: tuple[complex, complex, complex] = (0, 0, 0)

    @classmethod
    def power(cls, c: float) -> "ConstraintParams":
        return cls(c=c)

    @classmethod
    def log(cls) -> "ConstraintParams":
        return cls(d=1)

    def lhs(self, z: complex) -> complex:
        return self.b * z * z + self.c * z + self.d


def constraint_params_for(pattern: PatternMap) -> ConstraintParams:
    """Constraint satisfied by a built power or log pattern, read from its metadata."""
    variant = pattern.meta.get("variant")
    if variant in ("zc", "z2", "z3"):
        return ConstraintParams.power(float(pattern.meta["c"]))
    if variant == "log":
        return ConstraintParams.log()
    raise DomainError(f"no constraint is known for patterns of kind {variant!r}")


def _axis_term(coef: complex, z: CPoint, zp: CPoint, zm: CPoint) -> complex | None:
    """2 coef (z+ - z)(z - z-)/(z+ - z-) with limits when a neighbour is infinite."""
    if coef == 0:
        return 0j
    w = z.to_complex()
    if zp.is_infinite and zm.is_infinite:
        return None
    if zm.is_infinite:
        return 2 * coef * (zp.to_complex() - w)
    if zp.is_infinite:
        return 2 * coef * (w - zm.to_complex())
    up, dn = zp.to_complex(), zm.to_complex()
    if up == dn:
        return None
    return 2 * coef * (up - w) * (w - dn) / (up - dn)


def constraint_rhs(pattern: PatternMap, params: ConstraintParams, p: Index) -> complex | None:
    """Right-hand side of the constraint at p, or None when it cannot be evaluated."""
    if not pattern.is_finite(p):
        return None
    z = pattern[p]
    total = 0j
    for n in (1, 2, 3):
        coef = p[n - 1] - params.a[n - 1]
        if coef == 0:
            continue
        up, dn = step(p, n, 1), step(p, n, -1)
        if up not in pattern or dn not in pattern:
            return None
        t = _axis_term(coef, z, pattern[up], pattern[dn])
        if t is None:
            return None
        total += t
    return total


def constraint_residual(pattern: PatternMap, params: ConstraintParams, p: Index) -> float | None:
    """|lhs - rhs| of the constraint at p; None marks a point that is not evaluable."""
    rhs = constraint_rhs(pattern, params, p)
    if rhs is None:
        return None
    return abs(params.lhs(pattern.z(p)) - rhs)


def max_constraint_residual(pattern: PatternMap, params: ConstraintParams) -> tuple[float, int]:
    """Worst residual and the number of points where it was evaluated."""
    worst, count = 0.0, 0
    for p in pattern.indices():
        r = constraint_residual(pattern, params, p)
        if r is None:
            continue
        worst = max(worst, r / max(1.0, abs(pattern.z(p))))
        count += 1
    return worst, count


def _axis_next(prev, cur, n: int, c, d, tiny: float = 1e-12):
    """Shared recurrence; `prev` is None for infinity.  Works for complex and mpmath values."""
    v = c * cur + d
    if prev is None:
        # the factor (z_n - z_{n-1})/(z_{n+1} - z_{n-1}) tends to 1
        return cur + v / (2 * n)
    a = cur - prev
    if a == 0:
        raise SingularStepError("consecutive axis values coincide")
    den = 2 * n * a - v
    if abs(den) <= tiny * max(abs(a), abs(v)) * 2 * n:
        raise SingularStepError(
            "axis step is singular (c = 2 makes z_2 infinite; use the z^2 builder)")
    return cur + v * a / den


def axis_step(zprev, zcur, n: int, c: complex, d: complex = 0) -> CPoint:
    """Next value along a coordinate axis from c z_n + d = 2n (z_{n+1}-z_n)(z_n-z_{n-1})/(z_{n+1}-z_{n-1}).

    n counts steps from the origin (always positive); the same recurrence
    serves every half-axis.
    """
    zp, zc = CPoint.of(zprev), CPoint.of(zcur)
    if zc.is_infinite:
        raise SingularStepError("current axis value is infinite")
    prev = None if zp.is_infinite else zp.to_complex()
    return CPoint.of(_axis_next(prev, zc.to_complex(), n, c, d))


# directions of the six half-axes: (family, sign)
HALF_AXES = ((1, 1), (2, 1), (3, -1), (1, -1), (2, -1))
SECTOR_SIGNS = {"Q": (1, 1, -1), "Q-left": (-1, 1, -1), "Q-right": (1, -1, -1)}


def _axis_angles(angles: AngleTriple) -> dict[tuple[int, int], object]:
    """Argument of the image of each half-axis for c = 1 (mpmath values)."""
    a1, a2, a3 = _hp_angles(angles)
    return {(1, 1): mpmath.mpf(0), (3, -1): a2, (2, 1): a1 + a2, (1, -1): mpmath.pi, (2, -1): -a3}


def _sectors_for(region: Region) -> list[str]:
    if region.kind in ("sector", "box", "slab"):
        return ["Q"]
    if region.kind in ("halfplane", "halfbox"):
        return ["Q", "Q-left", "Q-right"]
    raise ValueError("power patterns live on the sector, box, slab, halfplane or halfbox regions")


def _axis_index(fam: int, sign: int, n: int) -> Index:
    return tuple(sign * n if i == fam - 1 else 0 for i in range(3))


def _extend_axes(vals: dict, rays, size: int, c, d, start: int) -> None:
    """Axis recurrence in working precision; values are mpmath numbers or None."""
    for fam, sign in rays:
        for n in range(start, size):
            vals[_axis_index(fam, sign, n + 1)] = _axis_next(
                vals[_axis_index(fam, sign, n - 1)], vals[_axis_index(fam, sign, n)], n, c, d)


def _hp_angles(angles: AngleTriple):
    if angles.is_isotropic:
        return (mpmath.pi / 3,) * 3
    return tuple(mpmath.mpf(a) for a in angles)


def _hp_deltas(angles: AngleTriple, scale=1):
    a1, a2, a3 = _hp_angles(angles)
    return tuple(scale * mpmath.exp(-1j * ph) for ph in (0, 2 * a3, -2 * a2))


def _rays_of(sectors: list[str]) -> list[tuple[int, int]]:
    rays = set()
    for s in sectors:
        sg = SECTOR_SIGNS[s]
        rays |= {(1, sg[0]), (2, sg[1]), (3, sg[2])}
    return [r for r in HALF_AXES if r in rays]


def _fill(vals: dict, deltas: Deltas, size: int, sectors: list[str], tol: float) -> tuple[dict, float]:
    out, worst = {}, 0.0
    for s in sectors:
        sg = SECTOR_SIGNS[s]
        seeds = {p: v for p, v in vals.items()
                 if all(x * g >= 0 for x, g in zip(p, sg))}
        filled, spread = propagate(seeds, deltas, size, sg, tol=tol)
        worst = max(worst, spread)
        out.update(filled)
    return out, worst


def _power_meta(variant, c, angles, region, spread, gauge_scale=1.0) -> dict:
    return {"variant": variant, "c": c, "angles": list(angles), "gauge_scale": gauge_scale,
            "region": [region.kind, region.size], "max_face_disagreement": spread}


def build_zc(c: float, angles: AngleTriple | None = None, region: Region | None = None,
             tol: float = CONSTRUCTION_TOL) -> PatternMap:
    """Hexagonal z^c for 0 < c < 2, from unit seeds and the axis recurrence."""
    if not 0 < c < 2:
        if c == 2:
            raise ValueError("z^c needs 0 < c < 2; for c = 2 use build_z2")
        raise ValueError("z^c needs 0 < c < 2; other exponents come from invert_pattern and dualize")
    angles = angles or AngleTriple.isotropic()
    region = region or Region("sector", 8)
    sectors = _sectors_for(region)
    rays = _rays_of(sectors)
    with mpmath.workdps(HP_DIGITS):
        cm = mpmath.mpf(c)
        theta = _axis_angles(angles)
        vals = {(0, 0, 0): mpmath.mpc(0)}
        for fam, sign in rays:
            vals[_axis_index(fam, sign, 1)] = mpmath.exp(1j * cm * theta[(fam, sign)])
        _extend_axes(vals, rays, region.size, cm, 0, 1)
        vals, spread = _fill(vals, _hp_deltas(angles), region.size, sectors, tol)
    meta = _power_meta("zc", c, angles, region, spread)
    return PatternMap(region, vals, angles_to_deltas(angles), meta).restrict(region)


def _second_ring(angles: AngleTriple, sectors: list[str]) -> dict:
    """Values at distance two from the origin for the degenerate (c = 2) pattern.

    An axis whose image has argument t carries exp(2 i t); the face point
    between axes with arguments t < s carries sin(s - t)/(s - t) exp(i (s + t)).
    """
    theta = _axis_angles(angles)
    vals = {}
    for s in sectors:
        sg = SECTOR_SIGNS[s]
        rays = [(1, sg[0]), (2, sg[1]), (3, sg[2])]
        for fam, sign in rays:
            vals[_axis_index(fam, sign, 2)] = mpmath.exp(2j * theta[(fam, sign)])
        for x in range(3):
            for y in range(x + 1, 3):
                r1, r2 = rays[x], rays[y]
                t1, t2 = sorted((theta[r1], theta[r2]))
                p = [0, 0, 0]
                p[r1[0] - 1] = r1[1]
                p[r2[0] - 1] = r2[1]
                vals[tuple(p)] = mpmath.sin(t2 - t1) / (t2 - t1) * mpmath.exp(1j * (t1 + t2))
    return vals


def build_z2(angles: AngleTriple | None = None, region: Region | None = None,
             tol: float = CONSTRUCTION_TOL) -> PatternMap:
    """Hexagonal z^2: the central circle degenerates to the point 0.

    Edge constants carry the factor 1/2 so that the dual is log z with the
    constraint normalized to 1.
    """
    angles = angles or AngleTriple.isotropic()
    region = region or Region("sector", 8)
    sectors = _sectors_for(region)
    rays = _rays_of(sectors)
    with mpmath.workdps(HP_DIGITS):
        vals = {(0, 0, 0): mpmath.mpc(0)}
        for fam, sign in rays:
            vals[_axis_index(fam, sign, 1)] = mpmath.mpc(0)
        vals.update(_second_ring(angles, sectors))
        _extend_axes(vals, rays, region.size, 2, 0, 2)
        vals, spread = _fill(vals, _hp_deltas(angles, 0.5), region.size, sectors, tol)
    deltas = tuple(0.5 * d for d in angles_to_deltas(angles))
    meta = _power_meta("z2", 2.0, angles, region, spread, 0.5)
    return PatternMap(region, vals, deltas, meta).restrict(region)


def _log_seeds() -> dict:
    pi, r3 = mpmath.pi, mpmath.sqrt(3)
    return {
        (0, 0, 0): None,
        (1, 0, 0): mpmath.mpc(0),
        (0, 0, -1): pi / 3 * 1j,
        (0, 1, 0): 2 * pi / 3 * 1j,
        (2, 0, 0): mpmath.mpf(1) / 2,
        (0, 0, -2): mpmath.mpf(1) / 2 + pi / 3 * 1j,
        (0, 2, 0): mpmath.mpf(1) / 2 + 2 * pi / 3 * 1j,
        (1, 0, -1): pi / 6 * (1 / r3 + 1j),
        (0, 1, -1): pi / 6 * (1 / r3 + 3j),
        (1, 1, 0): pi / 3 * (-1 / r3 + 1j),
    }


def log_seed_values() -> dict[Index, CPoint]:
    """The tabulated isotropic log z data rounded to double precision."""
    with mpmath.workdps(HP_DIGITS):
        return {p: CPoint.of(None if v is None else complex(v)) for p, v in _log_seeds().items()}


def build_log(region: Region | None = None, angles: AngleTriple | None = None,
              tol: float = CONSTRUCTION_TOL) -> PatternMap:
    """Hexagonal log z.

    Isotropic sector builds start from the tabulated seeds and the constraint
    with right-hand side 1; anything else is obtained as the dual of z^2.
    """
    region = region or Region("sector", 8)
    angles = angles or AngleTriple.isotropic()
    if not angles.is_isotropic or region.kind in ("halfplane", "halfbox"):
        z2 = build_z2(angles, region, tol)
        pat = dualize(z2, (1, 0, 0), 0, on_singular="infinity")
        meta = dict(pat.meta, variant="log", c=0.0)
        return PatternMap(pat.region, pat.values, pat.deltas, meta)
    _sectors_for(region)
    with mpmath.workdps(HP_DIGITS):
        vals = _log_seeds()
        _extend_axes(vals, [(1, 1), (2, 1), (3, -1)], region.size, 0, 1, 2)
        vals, spread = _fill(vals, _hp_deltas(angles, 0.5), region.size, ["Q"], tol)
    deltas = tuple(0.5 * d for d in angles_to_deltas(angles))
    meta = _power_meta("log", 0.0, angles, region, spread, 0.5)
    return PatternMap(region, vals, deltas, meta).restrict(region)


Z3_DELTAS: Deltas = (-3 + 0j, -3 * OMEGA ** 2, -3 * OMEGA)


def z3_value(p: Index) -> complex:
    """(k + l w + m w^2)^3 - (k + l + m), exact in Eisenstein integers before rounding."""
    # k + l w + m w^2 = a + b w since w^2 = -1 - w
    a, b = p[0] - p[2], p[1] - p[2]
    # (a + b w)^2 = (a^2 - b^2) + (2ab - b^2) w
    x, y = a * a - b * b, 2 * a * b - b * b
    # (x + y w)(a + b w) = (xa - yb) + (xb + ya - yb) w
    x, y = x * a - y * b - sum(p), x * b + y * a - y * b
    return complex(x - y / 2, y * math.sqrt(3) / 2)


def build_z3(region: Region | None = None) -> PatternMap:
    """Closed form (k + l w + m w^2)^3 - (k + l + m)."""
    region = region or Region("box", 5)
    vals = {p: CPoint.of(z3_value(p)) for p in region.indices()}
    meta = {"variant": "z3", "c": 3.0, "angles": [math.pi / 3] * 3, "gauge_scale": -3.0,
            "region": [region.kind, region.size]}
    return PatternMap(region, vals, Z3_DELTAS, meta)


def build_linear(region: Region | None = None, deltas: Deltas | None = None) -> PatternMap:
    """The identity lattice k + l w + m w^2."""
    region = region or Region("strip", 4)
    deltas = deltas or angles_to_deltas(AngleTriple.isotropic())
    vals = {p: CPoint.of(embed_reference(p)) for p in region.indices()}
    meta = {"variant": "linear", "c": 1.0, "angles": [math.pi / 3] * 3,
            "region": [region.kind, region.size]}
    return PatternMap(region, vals, tuple(deltas), meta)


def invert_pattern(pattern: PatternMap) -> PatternMap:
    """Pointwise z -> 1/z; cross-ratios are unchanged and the exponent flips sign."""
    vals = {p: CPoint(v.b, v.a) for p, v in pattern.values.items()}
    meta = dict(pattern.meta)
    if meta.get("c") is not None:
        meta["c"] = -meta["c"]
    meta["variant"] = "inverted"
    return PatternMap(pattern.region, vals, pattern.deltas, meta)


@dataclass(frozen=True)
class PowerSpec:
    variant: str
    c: float = 1.0
    angles: AngleTriple = field(default_factory=AngleTriple.isotropic)
    region: Region = field(default_factory=lambda: Region("sector", 8))


def build(spec: PowerSpec) -> PatternMap:
    if spec.variant == "zc":
        return build_zc(spec.c, spec.angles, spec.region)
    if spec.variant == "z2":
        return build_z2(spec.angles, spec.region)
    if spec.variant == "log":
        return build_log(spec.region, spec.angles)
    if spec.variant == "z3":
        return build_z3(spec.region)
    raise ValueError(f"unknown power variant {spec.variant!r}")
