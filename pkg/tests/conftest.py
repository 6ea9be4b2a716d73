import math

import pytest
from hypothesis import settings

from hexcircles.crossratio_core import AngleTriple
from hexcircles.isomonodromic import build_log, build_z2, build_z3, build_zc
from hexcircles.lattice import Region

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def zc23():
    return build_zc(2 / 3, region=Region("sector", 8))


@pytest.fixture(scope="session")
def zc23_box():
    return build_zc(2 / 3, region=Region("box", 5))


@pytest.fixture(scope="session")
def zc43():
    return build_zc(4 / 3, region=Region("sector", 8))


@pytest.fixture(scope="session")
def z2_iso():
    return build_z2(region=Region("sector", 8))


@pytest.fixture(scope="session")
def log_iso():
    return build_log(Region("sector", 8))


@pytest.fixture(scope="session")
def z3_box():
    return build_z3(Region("box", 5))


@pytest.fixture(scope="session")
def aniso():
    return AngleTriple.from_two(math.pi / 2, math.pi / 4)


_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if not item.name.startswith("test_criterion_"):
        return
    key = item.name
    failed = report.failed
    if report.when == "call" or failed:
        info = dict(report.user_properties).get("info", "")
        prev = _ACCEPTANCE.get(key, ("PASS", ""))
        status = "FAIL" if failed or prev[0] == "FAIL" else "PASS"
        _ACCEPTANCE[key] = (status, info or prev[1])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE):
        status, info = _ACCEPTANCE[key]
        number = int(key.split("_")[2])
        label = " ".join(key.split("_")[3:])
        line = f"criterion {number:2d}: {status}  {label}"
        terminalreporter.write_line(line + (f"  ({info})" if info else ""))
