import json
import math

import pytest

from hexcircles.crossratio_core import PatternMap
from hexcircles.isomonodromic import build_linear, build_zc
from hexcircles.lattice import Region
from hexcircles.patterns_io import (FORMAT_VERSION, ConcyclicityError, NoGeometryError,
                                    PatternFormatError, SvgOptions, cli_main, dumps, export_json,
                                    export_svg, extract_circles, import_json, loads,
                                    pattern_document, run_suite, svg_string)
from hexcircles.projective_complex import CPoint, DomainError
from hexcircles.special_patterns import doyle_radii, layout_from_radii


class TestCircles:
    def test_identity_lattice(self):
        circles = extract_circles(build_zc(1, region=Region("sector", 5)))
        assert circles
        for c in circles:
            assert c.radius == pytest.approx(1)
            assert sum(c.index) == 0
        centers = {c.index: c.center for c in circles}
        assert abs(centers[(1, 0, -1)] - centers[(0, 0, 0)]) == pytest.approx(math.sqrt(3))

    def test_log_skips_line(self, log_iso):
        circles = extract_circles(log_iso)
        assert circles and (0, 0, 0) not in {c.index for c in circles}

    def test_corrupted(self, zc23):
        vals = dict(zc23.values)
        vals[(1, 0, 0)] = CPoint.of(zc23.z((1, 0, 0)) + 0.1)
        with pytest.raises(ConcyclicityError):
            extract_circles(zc23.with_values(vals))

    def test_cubic_has_no_circles(self, z3_box):
        with pytest.raises(DomainError):
            extract_circles(z3_box)

    def test_uncentered_pattern(self):
        # a layout composed with z -> 1/z keeps circles but loses centers
        pat = layout_from_radii(doyle_radii(0.1, 0.2, 2))
        inv = pat.with_values({p: CPoint(v.b, v.a) for p, v in pat.values.items() if not v.a == 0},
                              variant="inverted")
        circles = extract_circles(inv)
        assert circles and all(c.radius > 0 for c in circles)


class TestJson:
    def test_round_trip_cubic(self, z3_box):
        back = loads(dumps(z3_box))
        assert set(back.values) == set(z3_box.values)
        assert all(back[p] == z3_box[p] for p in z3_box.indices())
        assert back.deltas == z3_box.deltas

    def test_infinity_survives(self, log_iso):
        back = loads(dumps(log_iso))
        assert back[(0, 0, 0)].is_infinite
        doc = json.loads(dumps(log_iso))
        origin = next(p for p in doc["points"] if (p["k"], p["l"], p["m"]) == (0, 0, 0))
        assert origin["infinite"] is True

    def test_bit_stable(self, zc23, log_iso, z3_box):
        for pat in (zc23, log_iso, z3_box):
            text = dumps(pat)
            assert dumps(loads(text)) == text

    def test_fields(self, zc23):
        doc = pattern_document(zc23)
        assert doc["version"] == FORMAT_VERSION
        assert set(doc["points"][0]) == {"k", "l", "m", "re", "im", "infinite"}
        assert set(doc["circles"][0]) == {"center_re", "center_im", "radius", "index"}
        assert all(sum(c["index"]) == 0 for c in doc["circles"])
        assert len(doc["meta"]["deltas"]) == 3 and "tolerance_report" in doc["meta"]

    def test_version_mismatch(self, zc23):
        doc = json.loads(dumps(zc23))
        doc["version"] = FORMAT_VERSION + 1
        with pytest.raises(PatternFormatError):
            loads(json.dumps(doc))

    @pytest.mark.parametrize("text", ["", "[]", "{\"version\": 1}", "{not json"])
    def test_malformed(self, text):
        with pytest.raises(PatternFormatError):
            loads(text)

    def test_files(self, tmp_path, zc23):
        path = tmp_path / "p.json"
        export_json(zc23, path)
        back = import_json(path)
        assert all(back.z(p) == zc23.z(p) for p in zc23.indices())


class TestSvg:
    def test_deterministic(self, zc23):
        assert svg_string(zc23) == svg_string(zc23)

    def test_one_element_per_circle(self, zc23):
        text = svg_string(zc23)
        assert text.count("<circle") == len(extract_circles(zc23))
        dotted = svg_string(zc23, SvgOptions(point_markers=True))
        assert dotted.count("<circle") > text.count("<circle")

    def test_fan(self, tmp_path):
        path = tmp_path / "fan.svg"
        export_svg(build_zc(6 / 5, region=Region("sector", 6)), path)
        text = path.read_text()
        assert "<svg" in text and text.count("<circle") == len(extract_circles(build_zc(6 / 5, region=Region("sector", 6))))

    def test_spiral(self):
        pat = layout_from_radii(doyle_radii(0.15, 0.05, 5))
        assert "viewBox" in svg_string(pat)

    def test_empty(self):
        empty = PatternMap(Region("strip", 1), {}, (1, 1, 1))
        with pytest.raises(NoGeometryError):
            svg_string(empty)
        with pytest.raises(NoGeometryError):
            svg_string([])


class TestSuites:
    def test_power_pattern_passes(self, zc23):
        results = run_suite(zc23, "all")
        assert all(r.status != "FAIL" for r in results)
        assert any(r.status == "PASS" for r in results)

    def test_corrupted_fails(self, zc23):
        vals = dict(zc23.values)
        vals[(3, 2, -5)] = CPoint.of(zc23.z((3, 2, -5)) + 1e-4)
        results = run_suite(zc23.with_values(vals), "crossratio")
        assert any(r.status == "FAIL" for r in results)

    def test_unknown_suite(self, zc23):
        with pytest.raises(ValueError):
            run_suite(zc23, "spectral")

    def test_linear_has_no_constraint_params(self):
        results = run_suite(build_linear(Region("sector", 3)), "constraint")
        assert all(r.status == "SKIP" for r in results)


class TestCli:
    def test_generate_verify(self, tmp_path, capsys):
        out = tmp_path / "p.json"
        assert cli_main(["generate", "zc", "--c", "0.6667", "--size", "8", "--out", str(out)]) == 0
        assert cli_main(["verify", "--in", str(out), "--suite", "all"]) == 0
        assert "PASS" in capsys.readouterr().out

    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            cli_main(["generate", "doyle", "--u", "0.2", "--v", "0.1", "--size", "3", "--out", str(path)])
        assert a.read_bytes() == b.read_bytes()

    def test_exponent_two(self, tmp_path, capsys):
        code = cli_main(["generate", "zc", "--c", "2", "--out", str(tmp_path / "x.json")])
        assert code == 2 and "z2" in capsys.readouterr().err

    def test_third_angle_refused(self, tmp_path):
        assert cli_main(["generate", "zc", "--c", "0.5", "--alpha3", "1",
                         "--out", str(tmp_path / "x.json")]) == 2

    def test_flag_combinations(self, tmp_path):
        out = str(tmp_path / "x.json")
        assert cli_main(["generate", "zc", "--c", "0.5", "--u", "1", "--out", out]) == 2
        assert cli_main(["generate", "zc", "--c", "0.5", "--alpha1", "1", "--out", out]) == 2
        assert cli_main(["generate", "confsym", "--a0", "0.3", "--b0", "0.3", "--c0", "0.3",
                         "--S", "2j", "--alpha1", "1", "--alpha2", "1", "--out", out]) == 2

    def test_dual_satisfies_dual_constraint(self, tmp_path):
        src, dual = tmp_path / "p.json", tmp_path / "d.json"
        cli_main(["generate", "zc", "--c", "0.5", "--size", "6", "--out", str(src)])
        assert cli_main(["dualize", "--in", str(src), "--out", str(dual)]) == 0
        assert loads(dual.read_text()).meta["c"] == pytest.approx(1.5)
        assert cli_main(["verify", "--in", str(dual), "--suite", "constraint"]) == 0

    def test_verify_failure_exit(self, tmp_path, zc23):
        vals = dict(zc23.values)
        vals[(3, 2, -5)] = CPoint.of(zc23.z((3, 2, -5)) + 1e-3)
        path = tmp_path / "bad.json"
        export_json(zc23.with_values(vals), path)
        assert cli_main(["verify", "--in", str(path), "--suite", "crossratio"]) == 1
        assert cli_main(["verify", "--in", str(path), "--suite", "crossratio", "--tol", "1"]) == 0

    def test_render(self, tmp_path):
        src, svg = tmp_path / "p.json", tmp_path / "p.svg"
        cli_main(["generate", "log", "--size", "5", "--out", str(src)])
        assert cli_main(["render", "--in", str(src), "--out", str(svg), "--points"]) == 0
        assert svg.read_text().count("<circle") > 10

    def test_bad_input_file(self, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text("{}")
        assert cli_main(["verify", "--in", str(path)]) == 2
