"""Numerical certificates of integrability: Lax matrices, wave functions,
isomonodromic A-matrices and the Toda-type equations with their extensions."""

from __future__ import annotations

import cmath
from collections import deque
from collections.abc import Mapping, Sequence

import numpy as np

from .crossratio_core import CONSTRUCTION_TOL, PatternMap, quad_target, quad_target_for
from .isomonodromic import ConstraintParams
from .lattice import Edge, Index, add, flower, step, sublattice_class, edge_family
from .projective_complex import DomainError
from .special_patterns import PETAL_FAMILY, TSData, hexagon_edges, hl_edge_family, hl_neighbor

LAMBDA_SAMPLES = (0.3, 0.7j, 1 + 0.5j)
MU_SAMPLES = (0.4, 2j)
S_SAMPLES = (2, 1 + 1j, 10j)

DEGENERATE_TOL = 1e-12

SIGMA3 = np.diag([1.0 + 0j, -1.0 + 0j])


class ExtensionError(ValueError):
    """Sublattice data does not extend consistently."""


def _finite(pattern: PatternMap, p: Index) -> complex:
    if not pattern.is_finite(p):
        raise DomainError(f"value at {p} is missing or infinite")
    return pattern.z(p)


def _coincide(a: complex, b: complex) -> bool:
    return abs(b - a) <= DEGENERATE_TOL * max(1.0, abs(a), abs(b))


def _usable_edge(pattern: PatternMap, p: Index, q: Index) -> bool:
    return pattern.is_finite(p) and pattern.is_finite(q) and not _coincide(pattern.z(p), pattern.z(q))


def _edge_diff(pattern: PatternMap, start: Index, end: Index) -> tuple[complex, int]:
    a, b = _finite(pattern, start), _finite(pattern, end)
    dz = b - a
    if _coincide(a, b):
        raise DomainError(f"edge {start} -> {end} has coincident endpoints")
    return dz, edge_family(start, end)


# ---------------------------------------------------------------- lambda Lax pair

def lax_edge(pattern: PatternMap, edge: Sequence[Index], lam: complex) -> tuple[np.ndarray, complex]:
    """Unnormalized transition matrix of an oriented edge and its determinant 1 - lam^2 Delta.

    The dual difference is eliminated: it equals Delta / (z_in - z_out).
    """
    start, end = edge[0], edge[1]
    dz, n = _edge_diff(pattern, start, end)
    delta = pattern.deltas[n - 1]
    m = np.array([[1, lam * dz], [lam * delta / dz, 1]], dtype=complex)
    return m, 1 - lam * lam * delta


def quad_zero_curvature(pattern: PatternMap, quad: Sequence[Index],
                        lams: Sequence[complex] = LAMBDA_SAMPLES) -> float:
    """Largest relative deviation of the product around the quad from its scalar value."""
    worst = 0.0
    for lam in lams:
        prod = np.eye(2, dtype=complex)
        for i in range(4):
            m, _ = lax_edge(pattern, (quad[i], quad[(i + 1) % 4]), lam)
            prod = m @ prod
        # each family is crossed twice, once in each direction
        expected = 1 + 0j
        for n in {edge_family(quad[i], quad[(i + 1) % 4]) for i in range(4)}:
            expected *= 1 - lam * lam * pattern.deltas[n - 1]
        err = np.abs(prod - expected * np.eye(2)).max()
        worst = max(worst, err / max(1.0, abs(expected)))
    return worst


def _bfs_path(pattern: PatternMap, target: Index, start: Index = (0, 0, 0),
              family_order: Sequence[int] = (1, 2, 3)) -> list[Edge]:
    """Shortest path through finite pattern values with nondegenerate edges."""
    if not pattern.is_finite(start) or not pattern.is_finite(target):
        raise DomainError("path endpoints must carry finite values")
    prev = {start: None}
    queue = deque([start])
    while queue:
        p = queue.popleft()
        if p == target:
            break
        for n in family_order:
            for sign in (1, -1):
                q = step(p, n, sign)
                if q in prev or not _usable_edge(pattern, p, q):
                    continue
                prev[q] = (p, n)
                queue.append(q)
    if target not in prev:
        raise DomainError(f"no admissible path from {start} to {target}")
    edges = []
    p = target
    while prev[p] is not None:
        q, n = prev[p]
        edges.append(Edge(q, p, n))
        p = q
    return edges[::-1]


def _path_valid(pattern: PatternMap, edges: list[Edge]) -> bool:
    return all(_usable_edge(pattern, e.start, e.end) for e in edges)


def _axis_path(start: Index, p: Index, order: Sequence[int]) -> list[Edge]:
    edges = []
    cur = start
    for n in order:
        d = p[n - 1] - start[n - 1]
        sign = 1 if d > 0 else -1
        for _ in range(abs(d)):
            nxt = step(cur, n, sign)
            edges.append(Edge(cur, nxt, n))
            cur = nxt
    return edges


def canonical_path(pattern: PatternMap, p: Index, alternate: bool = False,
                   origin: Index = (0, 0, 0)) -> list[Edge]:
    """Steps along k, then l, then m when that stays inside the data; otherwise a shortest path.

    `alternate` picks a path with the opposite family priority.
    """
    order = (3, 2, 1) if alternate else (1, 2, 3)
    edges = _axis_path(origin, p, order)
    if not edges or _path_valid(pattern, edges):
        return edges
    return _bfs_path(pattern, p, origin, family_order=order)


def wave_function(pattern: PatternMap, p: Index, lam: complex,
                  path: list[Edge] | None = None, origin: Index = (0, 0, 0)) -> np.ndarray:
    """Psi(p) with Psi(origin) = I, from the normalized transition matrices along a path."""
    edges = canonical_path(pattern, p, origin=origin) if path is None else path
    psi = np.eye(2, dtype=complex)
    logscale = 0j
    for e in edges:
        m, d = lax_edge(pattern, (e.start, e.end), lam)
        psi = m @ psi
        logscale += cmath.log(d)
    # paths to the same point differ by an even number of steps per family,
    # so halving the summed logarithms is branch independent
    return psi * cmath.exp(-logscale / 2)


def path_independence(pattern: PatternMap, p: Index, lams: Sequence[complex] = LAMBDA_SAMPLES,
                      origin: Index = (0, 0, 0)) -> float:
    a = canonical_path(pattern, p, origin=origin)
    b = canonical_path(pattern, p, alternate=True, origin=origin)
    worst = 0.0
    for lam in lams:
        pa = wave_function(pattern, p, lam, a)
        pb = wave_function(pattern, p, lam, b)
        worst = max(worst, np.abs(pa - pb).max() / max(1.0, np.abs(pa).max()))
    return worst


def wave_derivative(pattern: PatternMap, p: Index, path: list[Edge] | None = None,
                    origin: Index = (0, 0, 0)) -> np.ndarray:
    """d Psi / d lambda at 0, by the product rule: each factor is I there."""
    edges = canonical_path(pattern, p, origin=origin) if path is None else path
    out = np.zeros((2, 2), dtype=complex)
    for e in edges:
        dz, n = _edge_diff(pattern, e.start, e.end)
        out += np.array([[0, dz], [pattern.deltas[n - 1] / dz, 0]])
    return out


def sym_check(pattern: PatternMap, dual: PatternMap, p: Index, origin: Index = (0, 0, 0)) -> float:
    """Deviation of d Psi/d lambda at 0 from [[0, z(p) - z(0)], [z*(p) - z*(0), 0]]."""
    d = wave_derivative(pattern, p, origin=origin)
    expected = np.array([[0, _finite(pattern, p) - _finite(pattern, origin)],
                         [_finite(dual, p) - _finite(dual, origin), 0]])
    return np.abs(d - expected).max() / max(1.0, np.abs(expected).max())


def finite_difference_derivative(pattern: PatternMap, p: Index, h: float = 1e-6,
                                 origin: Index = (0, 0, 0)) -> np.ndarray:
    path = canonical_path(pattern, p, origin=origin)
    return (wave_function(pattern, p, h, path) - wave_function(pattern, p, -h, path)) / (2 * h)


def twisted_symmetry(m_plus: np.ndarray, m_minus: np.ndarray) -> float:
    """|| L(-lambda) - sigma3 L(lambda) sigma3 ||."""
    return float(np.abs(m_minus - SIGMA3 @ m_plus @ SIGMA3).max())


# ---------------------------------------------------------------- conformal Lax pair

def conformal_lax_matrices(T: complex, S: complex) -> dict[int, np.ndarray]:
    if S == 0 or S == 1:
        raise DomainError("S must differ from 0 and 1")
    return {
        1: np.array([[-1, (S - 1) / S], [(T + S - 1) / (1 - S), 1]], dtype=complex),
        2: np.array([[T * S, 1 - T * S], [S * (1 + T * (S - 1)) / (S - 1), -T * S]], dtype=complex),
        3: np.array([[1 - S, -1 + T * (1 / S - 1) + S], [-S, S - 1]], dtype=complex),
    }


def conformal_lax_defect(T: Sequence[complex], S: complex) -> float:
    """min over rho of ||L1(T4)L2(T5)L3(T6) - rho L3(T3)L2(T2)L1(T1)|| relative to the left side.

    T1..T6 are listed so that T1, T2, T3 sit on edges of families 1, 2, 3.
    """
    L = [conformal_lax_matrices(t, S) for t in T]
    left = L[3][1] @ L[4][2] @ L[5][3]
    right = L[2][3] @ L[1][2] @ L[0][1]
    r = right.ravel()
    rho = np.vdot(r, left.ravel()) / np.vdot(r, r)
    return float(np.linalg.norm(left - rho * right) / max(np.linalg.norm(left), 1e-300))


def family_ordered_T(ts: TSData, center: Index) -> list[complex]:
    """The six T's of a hexagon starting on its family-1 edge and running so that families read 1, 2, 3."""
    es = hexagon_edges(center)
    fams = [hl_edge_family(e) for e in es]
    vals = [ts.T[e] for e in es]
    i0 = fams.index(1)
    seq = [(fams[(i0 - k) % 6], vals[(i0 - k) % 6]) for k in range(6)]
    if [f for f, _ in seq[:3]] != [1, 2, 3]:
        seq = [(fams[(i0 + k) % 6], vals[(i0 + k) % 6]) for k in range(6)]
    return [v for _, v in seq]


def conformal_lax_residual(ts: TSData, center: Index, S_values: Sequence[complex] = S_SAMPLES) -> float:
    if ts.hexagon(center) is None:
        raise DomainError(f"hexagon at {center} is incomplete")
    T = family_ordered_T(ts, center)
    return max(conformal_lax_defect(T, S) for S in S_values)


# ---------------------------------------------------------------- isomonodromic A

def _axis_block(pattern: PatternMap, p: Index, n: int, a_n: complex) -> np.ndarray:
    coef = p[n - 1] - a_n
    out = a_n / 2 * np.eye(2, dtype=complex)
    if coef == 0:
        return out
    z = _finite(pattern, p)
    up = _finite(pattern, step(p, n, 1))
    dn = _finite(pattern, step(p, n, -1))
    if up == dn:
        raise DomainError(f"axis neighbors of {p} coincide")
    # off-diagonal signs flipped relative to the naive residue form; the other sign breaks compatibility
    m = np.array([[up - z, -(up - z) * (z - dn)], [-1, z - dn]], dtype=complex)
    return out + coef / (up - dn) * m


def iso_matrices(pattern: PatternMap, params: ConstraintParams, p: Index) -> tuple[np.ndarray, list[np.ndarray]]:
    """C and B^(1), B^(2), B^(3) at p."""
    z = _finite(pattern, p)
    b, c, d = params.b, params.c, params.d
    C = 0.5 * np.array([[-b * z - c / 2, b * z * z + c * z + d], [b, b * z + c / 2]], dtype=complex)
    B = [_axis_block(pattern, p, n, params.a[n - 1]) for n in (1, 2, 3)]
    return C, B


def iso_A(pattern: PatternMap, params: ConstraintParams, p: Index, mu: complex) -> np.ndarray:
    if mu == 0 or any(abs(mu * dl - 1) <= 1e-14 for dl in pattern.deltas):
        raise DomainError(f"mu = {mu} is a pole")
    C, B = iso_matrices(pattern, params, p)
    A = C / mu
    for n in (1, 2, 3):
        A = A + B[n - 1] / (mu - 1 / pattern.deltas[n - 1])
    return A


def iso_compatibility(pattern: PatternMap, params: ConstraintParams, edge: Sequence[Index],
                      mus: Sequence[complex] = MU_SAMPLES) -> float:
    """|| dL/dmu - (A_in L - L A_out) || on an edge oriented towards larger k + l + m."""
    start, end = edge[0], edge[1]
    if sum(end) < sum(start):
        start, end = end, start
    dz, n = _edge_diff(pattern, start, end)
    delta = pattern.deltas[n - 1]
    worst = 0.0
    for mu in mus:
        L = np.array([[1, dz], [mu * delta / dz, 1]], dtype=complex)
        dL = np.array([[0, 0], [delta / dz, 0]], dtype=complex)
        a_in = iso_A(pattern, params, end, mu)
        a_out = iso_A(pattern, params, start, mu)
        rhs = a_in @ L - L @ a_out
        scale = max(1.0, np.abs(a_in @ L).max(), np.abs(L @ a_out).max())
        worst = max(worst, np.abs(dL - rhs).max() / scale)
    return worst


def iso_edges(pattern: PatternMap) -> list[tuple[Index, Index]]:
    """Edges whose endpoints both have all six axis neighbors with finite values."""
    def ok(p):
        if not pattern.is_finite(p):
            return False
        return all(pattern.is_finite(step(p, n, s)) for n in (1, 2, 3) for s in (1, -1))
    good = {p for p in pattern.values if ok(p)}
    out = []
    for p in sorted(good):
        for n in (1, 2, 3):
            q = step(p, n)
            if q in good and _usable_edge(pattern, p, q):
                out.append((p, q))
    return out


# ---------------------------------------------------------------- Toda-type equations

def toda_coefficients(deltas: Sequence[complex]) -> tuple[complex, complex, complex]:
    """A_n = Delta_{n+2} - Delta_{n+1}."""
    return tuple(deltas[(n + 1) % 3] - deltas[n % 3] for n in (1, 2, 3))


def _inv(z: complex, w: complex) -> complex:
    if z == w:
        raise DomainError("coincident points in a Toda sum")
    return 1 / (z - w)


def toda_hex_residual(pattern: PatternMap, center: Index) -> float:
    """|sum_n A_n (1/(z - z_n) + 1/(z - z_{n+3}))| over the petals of a flower, scaled by |z - z_n|."""
    fl = flower(center)
    z = _finite(pattern, center)
    A = toda_coefficients(pattern.deltas)
    total = 0j
    scale = 0.0
    for j, q in enumerate(fl.petals):
        t = A[PETAL_FAMILY[j] - 1] * _inv(z, _finite(pattern, q))
        total += t
        scale = max(scale, abs(t))
    return abs(total) / max(scale, 1e-300)


def toda_vertex_residual(pattern: PatternMap, vertex: Index) -> float:
    """|sum_n A_n / (w - w_n)| over the three neighbors of an intersection point, relative."""
    w = _finite(pattern, vertex)
    A = toda_coefficients(pattern.deltas)
    terms = [A[n - 1] * _inv(w, _finite(pattern, hl_neighbor(vertex, n))) for n in (1, 2, 3)]
    return abs(sum(terms)) / max(max(abs(t) for t in terms), 1e-300)


def toda_square_residual(pattern: PatternMap, p: Index) -> float:
    """Square-grid form on the plane m = const using the four diagonal neighbors."""
    z = _finite(pattern, p)
    pp = _finite(pattern, add(p, (1, 1, 0)))
    mm = _finite(pattern, add(p, (-1, -1, 0)))
    pm = _finite(pattern, add(p, (1, -1, 0)))
    mp = _finite(pattern, add(p, (-1, 1, 0)))
    terms = [_inv(z, pp), _inv(z, mm), -_inv(z, pm), -_inv(z, mp)]
    return abs(sum(terms)) / max(max(abs(t) for t in terms), 1e-300)


def simple_fraction_fourth(q: complex, u1: complex, u2: complex, u3: complex) -> complex:
    """u4 with q(u1, u2, u3, u4) = q.

    Solved from the simple-fraction form 1/(u2 - u1) - p/(u2 - u3) + (p - 1)/(u2 - u4) = 0,
    which holds with p = 1/q for this cross-ratio convention.
    """
    if q == 0:
        return u3
    p = 1 / q
    s = p / (u2 - u3) - 1 / (u2 - u1)
    if s == 0:
        return complex("inf")
    return u2 - (p - 1) / s


def _extend(known: dict[Index, complex], quads: list[tuple[tuple[Index, ...], complex]],
            tol: float) -> tuple[dict[Index, complex], float]:
    """Fill unknown corners of quads (u1, u2, u3, u4) where u1, u3 are given data.

    A quad with u2 known and u4 unknown (or the reverse) fixes the missing
    corner.  Quads whose four corners all end up known are checked.
    """
    vals = dict(known)
    by_point: dict[Index, list[int]] = {}
    for k, (quad, _) in enumerate(quads):
        for p in quad:
            by_point.setdefault(p, []).append(k)
    pending = deque(range(len(quads)))
    worst = 0.0
    while pending:
        k = pending.popleft()
        (u1, u2, u3, u4), q = quads[k]
        if u1 not in vals or u3 not in vals:
            continue
        if u2 in vals and u4 not in vals:
            src, dst = u2, u4
        elif u4 in vals and u2 not in vals:
            src, dst = u4, u2
        else:
            if u2 in vals and u4 in vals:
                a, b, c, d = (vals[u] for u in (u1, u2, u3, u4))
                err = abs(simple_fraction_fourth(q, a, b, c) - d) / max(1.0, abs(d))
                worst = max(worst, err)
            continue
        # q(u1, u2, u3, u4) = q(u3, u4, u1, u2): swapping the roles keeps q
        a, c = (u1, u3) if src == u2 else (u3, u1)
        vals[dst] = simple_fraction_fourth(q, vals[a], vals[src], vals[c])
        for k2 in by_point[dst]:
            pending.append(k2)
    if worst > tol:
        raise ExtensionError(f"extension does not close (defect {worst:.3g})")
    return vals, worst


def toda_extend_hex(centers: Mapping[Index, complex], deltas: Sequence[complex], seed: tuple[Index, complex],
                    tol: float = CONSTRUCTION_TOL) -> dict[Index, complex]:
    """Intersection points from circle-center data and one intersection-point value.

    Every kite (center, vertex, petal, next vertex) has a fixed cross-ratio,
    so one known vertex determines the next.
    """
    quads = []
    for c in centers:
        if sublattice_class(c) != 0:
            raise ValueError(f"{c} is not a center index")
        fl = flower(c)
        for j in range(6):
            quad = (c, fl.vertices[j], fl.petals[j], fl.vertices[(j + 1) % 6])
            if quad[2] in centers:
                quads.append((quad, quad_target_for(deltas, quad)))
    known = {p: complex(v) for p, v in centers.items()}
    known[seed[0]] = complex(seed[1])
    vals, _ = _extend(known, quads, tol)
    return {p: v for p, v in vals.items() if p not in centers}


def toda_extend_square(sublattice: Mapping[Index, complex], q: complex, seed: tuple[Index, complex],
                       tol: float = CONSTRUCTION_TOL) -> dict[Index, complex]:
    """Other sublattice of a square-grid map on the plane m = 0 with constant cross-ratio q.

    Quads are (x, x + e1, x + e1 + e2, x + e2); `sublattice` holds one
    checkerboard class and `seed` one point of the other.
    """
    quads = []
    parity = None
    for p in sublattice:
        if parity is None:
            parity = (p[0] + p[1]) % 2
        if (p[0] + p[1]) % 2 != parity or p[2] != 0:
            raise ValueError("sublattice points must share parity on the plane m = 0")
        for dk, dl in ((0, 0), (-1, -1)):
            x = (p[0] + dk, p[1] + dl, 0)
            quad = (x, add(x, (1, 0, 0)), add(x, (1, 1, 0)), add(x, (0, 1, 0)))
            if quad[0] in sublattice and quad[2] in sublattice:
                quads.append((quad, q))
        for dk, dl in ((-1, 0), (0, -1)):
            x = (p[0] + dk, p[1] + dl, 0)
            quad = (x, add(x, (1, 0, 0)), add(x, (1, 1, 0)), add(x, (0, 1, 0)))
            if quad[1] in sublattice and quad[3] in sublattice:
                # rotate so that the given diagonal comes first: q(b, c, d, a) = 1/q(a, b, c, d)
                quads.append(((quad[1], quad[2], quad[3], quad[0]), 1 / q))
    known = {p: complex(v) for p, v in sublattice.items()}
    known[seed[0]] = complex(seed[1])
    vals, _ = _extend(known, quads, tol)
    return {p: v for p, v in vals.items() if p not in sublattice}


def square_cross_ratio(deltas: Sequence[complex]) -> complex:
    """Cross-ratio of the (x, x+e1, x+e1+e2, x+e2) quads of a pattern."""
    return quad_target(deltas, (1, 2))
