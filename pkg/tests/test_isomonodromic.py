import cmath
import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from hexcircles.crossratio_core import AngleTriple, max_quad_residual
from hexcircles.isomonodromic import (ConstraintParams, PowerSpec, SingularStepError, axis_step,
                                      build, build_linear, build_log, build_z2, build_zc,
                                      constraint_params_for, constraint_residual, invert_pattern,
                                      log_seed_values, max_constraint_residual, z3_value)
from hexcircles.lattice import OMEGA, Region, embed_reference, region_quads
from hexcircles.projective_complex import CPoint, DomainError


class TestAxisStep:
    def test_identity_exponent(self):
        assert axis_step(0, 1, 1, 1).to_complex() == pytest.approx(2)

    @given(st.floats(0.05, 1.95), st.builds(complex, st.floats(-3, 3), st.floats(-3, 3)))
    def test_first_step(self, c, eps):
        if abs(eps) < 1e-3:
            return
        got = axis_step(0, eps, 1, c).to_complex()
        assert abs(got - 2 * eps / (2 - c)) < 1e-12 * abs(eps) / (2 - c)

    def test_exponent_two_is_singular(self):
        with pytest.raises(SingularStepError):
            axis_step(0, 0.3, 1, 2)

    def test_coincident_values(self):
        with pytest.raises(SingularStepError):
            axis_step(1, 1, 2, 0.5)

    def test_identity_recurrence(self):
        prev, cur = CPoint.of(0), CPoint.of(1)
        for n in range(1, 8):
            prev, cur = cur, axis_step(prev, cur, n, 1)
            assert cur.to_complex() == pytest.approx(n + 1)


class TestConstraint:
    def test_linear_map(self):
        pat = build_linear(Region("box", 4))
        worst, count = max_constraint_residual(pat, ConstraintParams.power(1))
        assert count > 0 and worst < 1e-13

    def test_power_interior(self, zc23):
        worst, count = max_constraint_residual(zc23, ConstraintParams.power(2 / 3))
        assert count > 20 and worst < 1e-9

    def test_box_interior(self, zc23_box):
        worst, count = max_constraint_residual(zc23_box, ConstraintParams.power(2 / 3))
        assert count > 20 and worst < 1e-9

    def test_perturbation(self, zc23):
        vals = dict(zc23.values)
        vals[(2, 2, -4)] = CPoint.of(zc23.z((2, 2, -4)) + 1e-3)
        bad = zc23.with_values(vals)
        assert constraint_residual(zc23, ConstraintParams.power(2 / 3), (2, 2, -4)) < 1e-9
        assert constraint_residual(bad, ConstraintParams.power(2 / 3), (2, 2, -4)) > 1e-5

    def test_log(self, log_iso):
        worst, count = max_constraint_residual(log_iso, ConstraintParams.log())
        assert count > 10 and worst < 1e-9

    def test_z2(self, z2_iso):
        worst, count = max_constraint_residual(z2_iso, ConstraintParams.power(2))
        assert count > 10 and worst < 1e-9

    def test_z3(self, z3_box):
        worst, count = max_constraint_residual(z3_box, ConstraintParams.power(3))
        assert count > 10 and worst < 1e-12

    def test_inverted_flips_exponent(self, zc23):
        inv = invert_pattern(zc23)
        axes = [p for p in inv.indices() if sum(1 for t in p if t) == 1 and inv.is_finite(p)]
        for p in axes:
            r = constraint_residual(inv, ConstraintParams.power(-2 / 3), p)
            if r is not None:
                assert r < 1e-9 * max(1, abs(inv.z(p)))

    def test_params_from_metadata(self, zc23, log_iso):
        assert constraint_params_for(zc23).c == 2 / 3
        assert constraint_params_for(log_iso).d == 1
        with pytest.raises(DomainError):
            constraint_params_for(build_linear())


class TestPower:
    def test_identity_exponent(self):
        pat = build_zc(1, region=Region("sector", 8))
        assert max(abs(pat.z(p) - embed_reference(p)) for p in pat.indices()) < 1e-11

    def test_axis_arguments(self, zc23):
        c = 2 / 3
        for n in range(1, 9):
            assert abs(cmath.phase(zc23.z((n, 0, -n))) - math.pi * c / 6) < 1e-9
            assert abs(cmath.phase(zc23.z((0, n, -n))) - math.pi * c / 2) < 1e-9

    def test_radii_monotone_along_axis(self, zc23, zc43):
        # radii behave like |z|^(c-1): shrinking for c < 1, growing for c > 1
        from hexcircles.special_patterns import radii_from_pattern
        small = radii_from_pattern(zc23)
        big = radii_from_pattern(zc43)
        for r, sign in ((small, -1), (big, 1)):
            row = [r[(n, 0, -n)] for n in range(0, 8)]
            assert all(sign * (b - a) > 0 for a, b in zip(row, row[1:]))

    def test_rotated_copies_match(self):
        # five copies rotated by 2 pi / 5 close up around 0 for c = 6/5
        c = 6 / 5
        pat = build_zc(c, region=Region("sector", 8))
        rot = cmath.exp(1j * math.pi * c / 3)
        assert abs(rot ** 5 - 1) < 1e-15
        shared = [(p, (-p[1], -p[2], -p[0])) for p in pat.indices() if (-p[1], -p[2], -p[0]) in pat]
        assert len(shared) > 10
        assert max(abs(pat.z(q) - rot * pat.z(p)) for p, q in shared) < 1e-9

    def test_quads(self, zc23):
        assert max_quad_residual(zc23, region_quads(zc23.region))[0] < 1e-9

    def test_rejects_exponents(self):
        with pytest.raises(ValueError, match="build_z2"):
            build_zc(2)
        with pytest.raises(ValueError):
            build_zc(2.5)

    def test_anisotropic_halfplane(self):
        pat = build_zc(0.5, AngleTriple.from_two(1.2, 0.9), Region("halfplane", 5))
        assert max_quad_residual(pat, region_quads(pat.region))[0] < 1e-9
        worst, _ = max_constraint_residual(pat, ConstraintParams.power(0.5))
        assert worst < 1e-9


class TestDegenerate:
    def test_z2_isotropic_value(self, z2_iso):
        want = 3 * math.sqrt(3) / (2 * math.pi) * cmath.exp(1j * math.pi / 3)
        assert abs(z2_iso.z((1, 0, -1)) - want) < 1e-15

    def test_z2_anisotropic_axis(self, aniso):
        pat = build_z2(aniso, Region("box", 3))
        assert abs(pat.z((0, 0, -2)) - 1j) < 1e-15

    def test_z2_center_point(self, z2_iso):
        for p in ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, -1)):
            assert z2_iso.z(p) == 0

    def test_z2_quads(self, z2_iso):
        assert max_quad_residual(z2_iso, region_quads(z2_iso.region))[0] < 1e-9

    def test_log_seed(self, log_iso):
        with mpmath.workdps(50):
            want = complex(mpmath.pi / 6 * (1 / mpmath.sqrt(3) + 1j))
        assert log_iso.z((1, 0, -1)) == want
        assert log_seed_values()[(1, 0, -1)].to_complex() == want
        assert log_iso[(0, 0, 0)].is_infinite

    def test_log_quads(self, log_iso):
        assert max_quad_residual(log_iso, region_quads(log_iso.region))[0] < 1e-9

    def test_log_anisotropic_via_dual(self, aniso):
        pat = build_log(Region("sector", 5), aniso)
        assert pat.meta["variant"] == "log"
        assert max_quad_residual(pat, region_quads(pat.region))[0] < 1e-9


class TestCubic:
    def test_printed_values(self):
        assert z3_value((1, 0, 0)) == 0
        assert z3_value((1, 1, 1)) == -3

    @given(st.tuples(*[st.integers(-6, 6)] * 3))
    def test_matches_float_formula(self, p):
        z = embed_reference(p) ** 3 - sum(p)
        assert abs(z3_value(p) - z) < 1e-11 * max(1, abs(z))

    def test_deltas(self, z3_box):
        assert z3_box.deltas[0] == -3
        assert abs(z3_box.deltas[1] + 3 * OMEGA ** 2) < 1e-15


class TestInversion:
    def test_pointwise(self, z3_box):
        inv = invert_pattern(z3_box)
        p = (2, 1, -1)
        assert abs(inv.z(p) - 1 / z3_value(p)) < 1e-15
        assert inv[(0, 0, 0)].is_infinite

    def test_constraint_survives_with_negated_exponent(self, z3_box):
        inv = invert_pattern(z3_box)
        worst, count = max_constraint_residual(inv, ConstraintParams.power(-3))
        assert count > 100 and worst < 1e-12

    def test_involution(self, zc23):
        back = invert_pattern(invert_pattern(zc23))
        assert all(back[p] == zc23[p] for p in zc23.indices())
        assert back.meta["c"] == zc23.meta["c"]


def test_build_dispatch():
    assert build(PowerSpec("z3", region=Region("box", 2))).meta["variant"] == "z3"
    with pytest.raises(ValueError):
        build(PowerSpec("sqrt"))
