import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from qgres.graph import load_graph  # noqa: E402

import goldens  # noqa: E402

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    failed = rep.failed
    if rep.when == "call" or failed:
        prev = _criteria.get(n)
        status = "FAIL" if failed or (prev and prev[1] == "FAIL") else "PASS"
        _criteria[n] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, status = _criteria[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {title}")


@pytest.fixture(scope="session")
def star():
    return load_graph(goldens.STAR)


@pytest.fixture(scope="session")
def square():
    return load_graph(goldens.SQUARE)


@pytest.fixture(scope="session")
def k4():
    return load_graph(goldens.K4)


@pytest.fixture(scope="session")
def interval():
    return load_graph(goldens.INTERVAL)
