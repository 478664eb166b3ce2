import warnings

import pytest

from wavesph.scenarios import ResolutionWarning

# criterion number -> (passed, detail); filled by the acceptance suite
CRITERIA: dict = {}


@pytest.fixture
def record_criterion():
    def record(n, ok, detail):
        CRITERIA[n] = (ok, detail)
    return record


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run the hour-scale simulations (criteria 5-8)")


def pytest_configure(config):
    warnings.simplefilter("ignore", ResolutionWarning)


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="long simulation; pass --runslow to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
