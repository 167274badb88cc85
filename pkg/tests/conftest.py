import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from heisenframe import fock  # noqa: E402


@pytest.fixture
def photon_pair():
    return fock.build_space([fock.photon("L"), fock.photon("R")])


@pytest.fixture
def dirac_space():
    return fock.build_space(
        [fock.electron("L"), fock.electron("R"), fock.positron("L"), fock.positron("R")]
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_criteria: dict[tuple[int, str], bool] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion group")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    key = tuple(mark.args)
    if report.failed or report.skipped:
        _criteria[key] = False
    elif report.when == "call":
        _criteria.setdefault(key, True)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for (number, title), ok in sorted(_criteria.items()):
        terminalreporter.write_line(f"criterion {number:>2} {title:<22} {'PASS' if ok else 'FAIL'}")
