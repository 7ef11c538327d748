import pytest

from capsched import dsl
from capsched.fixtures import path as fixture_path


@pytest.fixture(scope="session")
def agc():
    return dsl.load(fixture_path("agc.rts"))


@pytest.fixture(scope="session")
def agc60():
    return dsl.load(fixture_path("agc_a12_60.rts"))


def pytest_configure(config):
    config._criteria = {}


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    results = item.config._criteria
    failed = call.excinfo is not None and not call.excinfo.errisinstance(pytest.skip.Exception)
    ok = results.get(number, (title, True))[1] and not failed
    results[number] = (title, ok)


def pytest_terminal_summary(terminalreporter, config):
    results = getattr(config, "_criteria", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, ok = results[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
