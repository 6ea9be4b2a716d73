import cmath
import math

import pytest
from hypothesis import assume, given, strategies as st

from hexcircles.projective_complex import (INF, Circle, CPoint, DomainError, Mobius, circumcircle,
                                           cross_ratio, fourth_point, mobius_from_pairs,
                                           multi_ratio, reflect_in_circle)

W = cmath.exp(2j * math.pi / 3)

coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False, allow_subnormal=False)
cplx = st.builds(complex, coord, coord)


def close(p, z, tol=1e-12):
    return CPoint.of(p).distance(CPoint.of(z)) <= tol


def spread_out(zs, gap=1e-2):
    return all(abs(a - b) > gap for i, a in enumerate(zs) for b in zs[i + 1:])


class TestCPoint:
    def test_infinity_forms(self):
        assert CPoint.of(None).is_infinite
        assert CPoint.of(complex("inf")).is_infinite
        assert CPoint.of(INF) is INF

    def test_nan_rejected(self):
        with pytest.raises(DomainError):
            CPoint.of(complex("nan"))

    def test_zero_pair_rejected(self):
        with pytest.raises(DomainError):
            CPoint(0, 0)

    @given(cplx)
    def test_to_complex_exact(self, z):
        assert CPoint.of(z).to_complex() == z

    def test_equality_projective(self):
        assert CPoint(2 + 2j, 2) == CPoint.of(1 + 1j)
        assert CPoint(3, 0) == INF

    def test_distance(self):
        assert CPoint.of(0).distance(INF) == pytest.approx(1.0)
        assert CPoint.of(1).distance(CPoint.of(1)) == 0


class TestCrossRatio:
    def test_finite(self):
        assert close(cross_ratio(0, 1, 2, 3), -1 / 3)

    def test_with_infinity(self):
        assert close(cross_ratio(0, 1, None, 2), 0.5)

    def test_unit_circles_at_unit_distance(self):
        q = cross_ratio(0, (1 + 1j * math.sqrt(3)) / 2, 1, (1 - 1j * math.sqrt(3)) / 2)
        assert close(q, cmath.exp(-2j * math.pi / 3))

    def test_three_coincident(self):
        with pytest.raises(DomainError):
            cross_ratio(1, 1, 1, 2)

    @given(st.lists(cplx, min_size=4, max_size=4),
           st.lists(st.builds(complex, st.floats(0.1, 10), st.floats(-5, 5)), min_size=4, max_size=4))
    def test_rescaling_invariance(self, zs, scales):
        assume(spread_out(zs))
        ref = cross_ratio(*zs)
        scaled = [CPoint(z * s, s) for z, s in zip(zs, scales)]
        assert cross_ratio(*scaled).distance(ref) < 1e-12

    @given(st.lists(cplx, min_size=4, max_size=4), st.lists(cplx, min_size=4, max_size=4))
    def test_mobius_invariance(self, zs, coeffs):
        assume(spread_out(zs))
        a, b, c, d = coeffs
        assume(abs(a * d - b * c) > 1e-1)
        m = Mobius([[a, b], [c, d]])
        ref = cross_ratio(*zs)
        img = cross_ratio(*(m(z) for z in zs))
        assert img.distance(ref) < 1e-9


class TestFourthPoint:
    def test_inverts_finite_example(self):
        assert close(fourth_point(-1 / 3, [0, 1, 2]), 3)

    def test_inverts_infinite_example(self):
        assert close(fourth_point(0.5, [0, 1, None]), 2)

    @given(st.lists(cplx, min_size=4, max_size=4), st.integers(1, 4))
    def test_round_trip_every_slot(self, zs, slot):
        assume(spread_out(zs, 0.1))
        q = cross_ratio(*zs)
        known = [z for i, z in enumerate(zs) if i != slot - 1]
        assert close(fourth_point(q, known, slot), zs[slot - 1], 1e-9)

    def test_bad_slot(self):
        with pytest.raises(ValueError):
            fourth_point(2, [0, 1, 2], 5)


class TestMultiRatio:
    def test_integers(self):
        assert close(multi_ratio(0, 1, 2, 3, 4, 5), -1 / 5)

    def test_regular_hexagon(self):
        pts = [cmath.exp(1j * math.pi * j / 3) for j in range(6)]
        assert close(multi_ratio(pts), -1)

    @given(st.lists(cplx, min_size=6, max_size=6))
    def test_cross_ratio_identity(self, zs):
        assume(spread_out(zs, 0.1))
        m = multi_ratio(zs).to_complex()
        q1 = cross_ratio(*zs[:4]).to_complex()
        q2 = cross_ratio(zs[3], zs[4], zs[5], zs[0]).to_complex()
        assert abs(m + q1 / q2) <= 1e-12 * max(1.0, abs(m))

    def test_consecutive_coincide(self):
        with pytest.raises(DomainError):
            multi_ratio(0, 1, 1, 2, 3, 4)


class TestMobius:
    def test_identity(self):
        m = mobius_from_pairs([0, 1, None], [0, 1, None])
        for z in (2, 1j, -3.5):
            assert close(m(z), z)

    def test_reciprocal_map(self):
        m = mobius_from_pairs([0, 1, None], [1, None, 0])
        assert close(m(2), -1)

    @given(st.lists(cplx, min_size=6, max_size=6))
    def test_sends_pairs(self, zs):
        assume(spread_out(zs[:3]) and spread_out(zs[3:]))
        m = mobius_from_pairs(zs[:3], zs[3:])
        for s, t in zip(zs[:3], zs[3:]):
            assert close(m(s), t, 1e-9)

    def test_coincident_source(self):
        with pytest.raises(DomainError):
            mobius_from_pairs([0, 0, 1], [0, 1, 2])

    def test_compose_and_inverse(self):
        m = Mobius([[1, 2], [3, 5]])
        ident = m @ m.inverse()
        for z in (0, 1j, -2.5, None):
            assert close(ident(z), z)
        assert close((m @ m)(1), m(m(1)))


class TestCircles:
    def test_unit_circle(self):
        c = circumcircle(1, 1j, -1)
        assert abs(c.center) < 1e-15 and c.radius == pytest.approx(1.0)

    def test_collinear_gives_line(self):
        c = circumcircle(0, 1, 2)
        assert c.is_line
        for z in (0, 1, 2, 7.5):
            assert c.contains(z)
        assert c.contains(None)

    def test_right_triangle(self):
        c = circumcircle(0, 1, 1 + 1j)
        assert c.center == pytest.approx(0.5 + 0.5j)
        for z in (0, 1, 1 + 1j):
            assert abs(abs(z - c.center) - c.radius) < 1e-15

    def test_through_infinity_is_line(self):
        assert circumcircle(0, 1j, None).is_line

    def test_coincident(self):
        with pytest.raises(DomainError):
            circumcircle(0, 0, 1)

    def test_reflect_infinity_gives_center(self):
        assert close(reflect_in_circle(None, Circle(2, 1)), 2)

    def test_reflect_origin(self):
        assert close(reflect_in_circle(0, Circle(2, 1)), 1.5)

    def test_reflect_center_gives_infinity(self):
        assert reflect_in_circle(2, Circle(2, 1)).is_infinite

    @given(cplx, st.builds(complex, st.floats(-3, 3), st.floats(-3, 3)), st.floats(0.1, 5))
    def test_involution(self, z, center, radius):
        assume(abs(z - center) > 1e-2)
        c = Circle(center, radius)
        assert close(reflect_in_circle(reflect_in_circle(z, c), c), z, 1e-10)

    @given(st.floats(0, 2 * math.pi), st.floats(0.1, 5))
    def test_fixes_circle_points(self, t, radius):
        c = Circle(1 - 2j, radius)
        z = c.center + radius * cmath.exp(1j * t)
        assert abs(reflect_in_circle(z, c).to_complex() - z) < 1e-12 * max(1, radius)

    @given(cplx)
    def test_line_reflection_involution(self, z):
        line = Circle.line(1 + 1j, 0.5)
        assert close(reflect_in_circle(reflect_in_circle(z, line), line), z, 1e-12)
