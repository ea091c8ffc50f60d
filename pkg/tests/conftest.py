import os
import random

import pytest
from hypothesis import HealthCheck, settings

from klytor.examples import example_tangent_pn, p1xp1_fan, p2_fan

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=300,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("KLYTOR_HYPOTHESIS_PROFILE", "default"))

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture(scope="session")
def tp2():
    return example_tangent_pn(2)


@pytest.fixture(scope="session")
def tp3():
    return example_tangent_pn(3)


@pytest.fixture(scope="session")
def fan_p2():
    return p2_fan()


@pytest.fixture(scope="session")
def fan_p1p1():
    return p1xp1_fan()


@pytest.fixture
def rng():
    return random.Random(20240611)


# ---- acceptance report: one PASS/FAIL line per criterion ---------------------

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): an acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = report.user_properties and dict(report.user_properties).get("criterion")
    if marker:
        number, title = marker
        ok = _CRITERIA.get(number, (title, True))[1] and report.passed
        _CRITERIA[number] = (title, ok)


def pytest_runtest_setup(item):
    m = item.get_closest_marker("criterion")
    if m:
        item.user_properties.append(("criterion", tuple(m.args)))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}")
