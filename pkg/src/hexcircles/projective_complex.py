"""Complex projective line arithmetic that treats the point at infinity exactly.

Points are stored as homogeneous pairs (a, b) standing for a/b, with b == 0
meaning infinity.  Every operation rescales its result by a power of two so
that the larger component has modulus in [1, 2); finite values convert back
to complex numbers without rounding.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class DomainError(ValueError):
    """Raised for degenerate configurations where an operation has no answer."""


def _normalize(a: complex, b: complex) -> tuple[complex, complex]:
    s = max(abs(a), abs(b))
    if s == 0.0 or not math.isfinite(s):
        raise DomainError("homogeneous pair must be finite and nonzero")
    # scale by a power of two so that a / b reproduces a finite value exactly
    e = math.frexp(s)[1] - 1
    return complex(math.ldexp(a.real, -e), math.ldexp(a.imag, -e)), \
        complex(math.ldexp(b.real, -e), math.ldexp(b.imag, -e))


@dataclass(frozen=True, eq=False)
class CPoint:
    a: complex
    b: complex

    def __post_init__(self):
        a, b = _normalize(self.a, self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def of(cls, z) -> "CPoint":
        """Coerce a complex number, None/inf (infinity) or a CPoint."""
        if isinstance(z, CPoint):
            return z
        if z is None:
            return INF
        z = complex(z)
        if cmath.isinf(z):
            return INF
        if cmath.isnan(z):
            raise DomainError("NaN is not a point of the Riemann sphere")
        return cls(z, 1.0)

    @property
    def is_infinite(self) -> bool:
        return self.b == 0

    def to_complex(self) -> complex:
        if self.is_infinite:
            return complex(math.inf, 0.0)
        return self.a / self.b

    def __eq__(self, other) -> bool:
        if not isinstance(other, CPoint):
            return NotImplemented
        return self.a * other.b == other.a * self.b

    __hash__ = None

    def distance(self, other: "CPoint") -> float:
        """Chordal distance on the Riemann sphere (unit diameter scaling)."""
        n = math.hypot(abs(self.a), abs(self.b)) * math.hypot(abs(other.a), abs(other.b))
        return abs(det(self, other)) / n

    def isclose(self, other, tol: float = 1e-12) -> bool:
        return self.distance(CPoint.of(other)) <= tol

    def __repr__(self) -> str:
        if self.is_infinite:
            return "CPoint(inf)"
        return f"CPoint({self.to_complex()!r})"


INF = CPoint(1.0, 0.0)


def det(p: CPoint, q: CPoint) -> complex:
    """d(p, q) = a_p b_q - a_q b_p, proportional to p - q for finite points."""
    return p.a * q.b - q.a * p.b


def _points(zs) -> list[CPoint]:
    return [CPoint.of(z) for z in zs]


def cross_ratio(z1, z2, z3, z4) -> CPoint:
    """q = (z2-z1)(z4-z3) / ((z3-z2)(z1-z4)), exact at infinity."""
    p1, p2, p3, p4 = _points((z1, z2, z3, z4))
    num = det(p2, p1) * det(p4, p3)
    den = det(p3, p2) * det(p1, p4)
    if num == 0 and den == 0:
        raise DomainError("cross-ratio undefined: three coincident points")
    return CPoint(num, den)


def _fourth_last(q: CPoint, p1: CPoint, p2: CPoint, p3: CPoint) -> CPoint:
    # q_b d21 d43 = q_a d32 d14 is linear in (a4, b4)
    u = q.b * det(p2, p1)
    v = q.a * det(p3, p2)
    a4 = u * p3.a + v * p1.a
    b4 = u * p3.b + v * p1.b
    if a4 == 0 and b4 == 0:
        raise DomainError("fourth point undetermined for this configuration")
    return CPoint(a4, b4)


def fourth_point(q, z_known: Sequence, slot: int = 4) -> CPoint:
    """Point for position `slot` (1..4) making cross_ratio equal q.

    `z_known` lists the three remaining points in their natural order.
    """
    q = CPoint.of(q)
    p = _points(z_known)
    if len(p) != 3:
        raise ValueError("exactly three known points are required")
    if slot == 4:
        return _fourth_last(q, p[0], p[1], p[2])
    if slot == 3:
        # q(z1,z2,z3,z4) = q(z2,z1,z4,z3)
        return _fourth_last(q, p[1], p[0], p[2])
    if slot == 2:
        # q(z1,z2,z3,z4) = q(z3,z4,z1,z2)
        return _fourth_last(q, p[1], p[2], p[0])
    if slot == 1:
        # q(z1,z2,z3,z4) = q(z4,z3,z2,z1)
        return _fourth_last(q, p[2], p[1], p[0])
    raise ValueError("slot must be 1, 2, 3 or 4")


def multi_ratio(*zs) -> CPoint:
    """(z1-z2)/(z2-z3) * (z3-z4)/(z4-z5) * (z5-z6)/(z6-z1)."""
    if len(zs) == 1:
        zs = tuple(zs[0])
    p = _points(zs)
    if len(p) != 6:
        raise ValueError("multi-ratio needs six points")
    num = det(p[0], p[1]) * det(p[2], p[3]) * det(p[4], p[5])
    den = det(p[1], p[2]) * det(p[3], p[4]) * det(p[5], p[0])
    if den == 0:
        raise DomainError("multi-ratio undefined: consecutive points coincide")
    return CPoint(num, den)


@dataclass(frozen=True, eq=False)
class Mobius:
    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=complex).reshape(2, 2)
        d = np.linalg.det(m)
        if d == 0:
            raise DomainError("singular matrix is not a Mobius map")
        m = m / np.sqrt(d)
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    def __call__(self, z) -> CPoint:
        p = CPoint.of(z)
        return CPoint(self.m[0, 0] * p.a + self.m[0, 1] * p.b,
                      self.m[1, 0] * p.a + self.m[1, 1] * p.b)

    apply = __call__

    def __matmul__(self, other: "Mobius") -> "Mobius":
        return Mobius(self.m @ other.m)

    def inverse(self) -> "Mobius":
        return Mobius(np.linalg.inv(self.m))

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(np.eye(2))


def _to_zero_one_inf(p1: CPoint, p2: CPoint, p3: CPoint) -> np.ndarray:
    d23 = det(p2, p3)
    d21 = det(p2, p1)
    if det(p1, p3) == 0 or d23 == 0 or d21 == 0:
        raise DomainError("Mobius map needs three distinct points")
    return np.array([[p1.b * d23, -p1.a * d23],
                     [p3.b * d21, -p3.a * d21]])


def mobius_from_pairs(src: Sequence, dst: Sequence) -> Mobius:
    """Unique Mobius map sending src[i] to dst[i] for i = 0, 1, 2."""
    s = _points(src)
    t = _points(dst)
    if len(s) != 3 or len(t) != 3:
        raise ValueError("need three source and three target points")
    ms = _to_zero_one_inf(*s)
    mt = _to_zero_one_inf(*t)
    return Mobius(np.linalg.solve(mt, ms))


@dataclass(frozen=True)
class Circle:
    """A circle, or a line when `is_line` (the line is {z : Re(conj(normal) z) = offset})."""

    center: complex = 0j
    radius: float = 1.0
    is_line: bool = False
    normal: complex = 1 + 0j
    offset: float = 0.0

    def __post_init__(self):
        if self.is_line:
            n = complex(self.normal)
            if abs(n) == 0:
                raise DomainError("line needs a nonzero normal")
            object.__setattr__(self, "normal", n / abs(n))
            object.__setattr__(self, "offset", float(self.offset) / abs(n))
        elif not self.radius > 0:
            raise DomainError("circle radius must be positive")

    @classmethod
    def line(cls, normal: complex, offset: float) -> "Circle":
        return cls(is_line=True, normal=normal, offset=offset)

    def contains(self, z, tol: float = 1e-12) -> bool:
        p = CPoint.of(z)
        if p.is_infinite:
            return self.is_line
        w = p.to_complex()
        if self.is_line:
            return abs((self.normal.conjugate() * w).real - self.offset) <= tol
        return abs(abs(w - self.center) - self.radius) <= tol * max(1.0, self.radius)


def circumcircle(z1, z2, z3, rel_tol: float = 1e-12) -> Circle:
    p = _points((z1, z2, z3))
    for i in range(3):
        for j in range(i + 1, 3):
            if p[i].isclose(p[j], 1e-15):
                raise DomainError("circumcircle needs three distinct points")
    finite = [q.to_complex() for q in p if not q.is_infinite]
    if len(finite) == 2:
        u, v = finite
        n = 1j * (v - u)
        return Circle.line(n, (n.conjugate() * u).real)
    a, b, c = finite
    ba, ca = b - a, c - a
    cross = (ba.conjugate() * ca).imag
    scale = abs(ba) * abs(ca)
    if abs(cross) <= rel_tol * scale:
        n = 1j * (b - a) if abs(ba) >= abs(ca) else 1j * (c - a)
        return Circle.line(n, (n.conjugate() * a).real)
    # center solves |w - a| = |w - b| = |w - c|
    w = (abs(ba) ** 2 * ca - abs(ca) ** 2 * ba) / (2j * cross)
    center = a + w
    return Circle(center=center, radius=abs(w))


def reflect_in_circle(z, circle: Circle) -> CPoint:
    """Inversive reflection; the center and infinity are swapped."""
    p = CPoint.of(z)
    if circle.is_line:
        if p.is_infinite:
            return INF
        w = p.to_complex()
        n = circle.normal
        return CPoint.of(w - 2 * ((n.conjugate() * w).real - circle.offset) * n)
    if p.is_infinite:
        return CPoint.of(circle.center)
    w = p.to_complex() - circle.center
    if w == 0:
        return INF
    return CPoint.of(circle.center + circle.radius ** 2 / w.conjugate())
