"""Index combinatorics of the strip lattice inside Z^3.

A vertex of the hexagonal pattern is a triple (k, l, m).  Inside the strip
|k + l + m| <= 1 the triples with sum 0 address circle centers and those with
sum +1 or -1 address intersection points.  A plane point of the triangular
lattice is k + l*w + m*w^2 with w = exp(2 pi i / 3); the strip picks exactly
one triple for each such point, which plays the role of the mod-3 quotient
labelling of the hexagonal lattice.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from typing import Iterator, NamedTuple

OMEGA = cmath.exp(2j * cmath.pi / 3)

Index = tuple[int, int, int]

UNIT = {1: (1, 0, 0), 2: (0, 1, 0), 3: (0, 0, 1)}

REGION_KINDS = ("halfplane", "sector", "slab", "box", "halfbox", "strip")


def add(p: Index, q: Index, scale: int = 1) -> Index:
    return (p[0] + scale * q[0], p[1] + scale * q[1], p[2] + scale * q[2])


def step(p: Index, family: int, sign: int = 1) -> Index:
    return add(p, UNIT[family], sign)


def sublattice_class(p: Index) -> int:
    return p[0] + p[1] + p[2]


def embed_reference(p: Index) -> complex:
    k, l, m = p
    return k + l * OMEGA + m * OMEGA ** 2


def edge_family(p: Index, q: Index) -> int:
    diff = [b - a for a, b in zip(p, q)]
    nonzero = [i for i, d in enumerate(diff) if d != 0]
    if len(nonzero) != 1 or abs(diff[nonzero[0]]) != 1:
        raise ValueError(f"{p} and {q} are not lattice neighbours")
    return nonzero[0] + 1


@dataclass(frozen=True)
class Region:
    """A finite lattice region.

    kinds:
      halfplane  m <= 0 inside the strip
      sector     k >= 0, l >= 0, m <= 0 inside the strip
      slab       m == 0, k >= 0, l >= 0 (square grid)
      box        k >= 0, l >= 0, m <= 0 in Z^3, no strip restriction
      halfbox    m <= 0 and not both k < 0 and l < 0, in Z^3 (three octants)
      strip      the whole strip
    All kinds are clipped to max(|k|, |l|, |m|) <= size.
    """

    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in REGION_KINDS:
            raise ValueError(f"unknown region kind {self.kind!r}")
        if self.size < 1:
            raise ValueError("region size must be positive")

    def __contains__(self, p: Index) -> bool:
        k, l, m = p
        if max(abs(k), abs(l), abs(m)) > self.size:
            return False
        s = k + l + m
        kind = self.kind
        if kind == "box":
            return k >= 0 and l >= 0 and m <= 0
        if kind == "halfbox":
            return m <= 0 and (k >= 0 or l >= 0)
        if kind == "slab":
            return m == 0 and k >= 0 and l >= 0
        if abs(s) > 1:
            return False
        if kind == "strip":
            return True
        if kind == "halfplane":
            return m <= 0
        return k >= 0 and l >= 0 and m <= 0

    def indices(self) -> Iterator[Index]:
        r = range(-self.size, self.size + 1)
        for p in itertools.product(r, r, r):
            if p in self:
                yield p

    @property
    def on_strip(self) -> bool:
        return self.kind in ("halfplane", "sector", "strip")


class Neighbor(NamedTuple):
    index: Index
    family: int
    sign: int


def neighbors(p: Index, region: Region) -> list[Neighbor]:
    if p not in region:
        raise ValueError(f"{p} is outside the region")
    out = []
    for n in (1, 2, 3):
        for sign in (1, -1):
            q = step(p, n, sign)
            if q in region:
                out.append(Neighbor(q, n, sign))
    return out


# petal j sits between boundary vertices j and j+1, counterclockwise from e1 - e3
PETAL_OFFSETS: tuple[Index, ...] = (
    (1, 0, -1), (0, 1, -1), (-1, 1, 0), (-1, 0, 1), (0, -1, 1), (1, -1, 0))
VERTEX_OFFSETS: tuple[Index, ...] = (
    (1, 0, 0), (0, 0, -1), (0, 1, 0), (-1, 0, 0), (0, 0, 1), (0, -1, 0))


class Flower(NamedTuple):
    center: Index
    petals: tuple[Index, ...]
    vertices: tuple[Index, ...]


def flower(center: Index) -> Flower:
    """Petal centers and intersection points around a circle, counterclockwise.

    Petal j shares the vertices j and j+1 (indices mod 6) with the center circle.
    """
    if sublattice_class(center) != 0:
        raise ValueError("flowers are centered on vertices with k+l+m = 0")
    return Flower(center,
                  tuple(add(center, d) for d in PETAL_OFFSETS),
                  tuple(add(center, d) for d in VERTEX_OFFSETS))


def hexahedron(p: Index) -> list[Index]:
    """Corners p + (a, b, -c) with a, b, c in {0, 1}."""
    return [add(p, (a, b, -c)) for a in (0, 1) for b in (0, 1) for c in (0, 1)]


class Edge(NamedTuple):
    start: Index
    end: Index
    family: int


def path_to(p: Index) -> list[Edge]:
    """Canonical path from the origin: all k-steps, then l-steps, then m-steps."""
    edges = []
    cur: Index = (0, 0, 0)
    for n in (1, 2, 3):
        target = p[n - 1]
        sign = 1 if target > 0 else -1
        for _ in range(abs(target)):
            nxt = step(cur, n, sign)
            edges.append(Edge(cur, nxt, n))
            cur = nxt
    return edges


def quads_at(p: Index) -> list[tuple[Index, Index, Index, Index]]:
    """The three elementary quadrilaterals with lowest corner p, as (x, x+ei, x+ei+ej, x+ej), i < j."""
    out = []
    for i, j in ((1, 2), (1, 3), (2, 3)):
        a = step(p, i)
        out.append((p, a, step(a, j), step(p, j)))
    return out


def region_quads(region: Region) -> list[tuple[Index, Index, Index, Index]]:
    """All elementary quadrilaterals with every corner inside the region."""
    pts = set(region.indices())
    out = []
    for p in sorted(pts):
        for quad in quads_at(p):
            if all(q in pts for q in quad):
                out.append(quad)
    return out


def strip_kites(region: Region) -> list[tuple[Index, Index, Index, Index]]:
    """Strip quadrilaterals written center first and counterclockwise.

    Each one is (c, v_j, petal_j, v_{j+1}) for a flower center c.
    """
    pts = set(region.indices())
    out = []
    for c in sorted(pts):
        if sublattice_class(c) != 0:
            continue
        fl = flower(c)
        for j in range(6):
            quad = (c, fl.vertices[j], fl.petals[j], fl.vertices[(j + 1) % 6])
            if all(q in pts for q in quad):
                out.append(quad)
    return out
