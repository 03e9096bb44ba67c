import sys

import pytest

from hrpsr import analyze, build_dcfa, load_builtin


@pytest.fixture(scope="session")
def trees():
    return load_builtin("trees")


@pytest.fixture(scope="session")
def persuade():
    return load_builtin("persuade")


@pytest.fixture(scope="session")
def series_parallel():
    return load_builtin("series_parallel")


@pytest.fixture(scope="session")
def tree_tables(trees):
    return analyze(build_dcfa(trees))


@pytest.fixture(scope="session")
def persuade_tables(persuade):
    return analyze(build_dcfa(persuade))


@pytest.fixture(scope="session")
def sp_tables(series_parallel):
    return analyze(build_dcfa(series_parallel))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[n])
