import re
import shutil

import pytest

from tyloc.constraints import load_prelude

WORKED_SOURCE = 'let x = "hi" in not x\n'

_results: dict[str, str] = {}


@pytest.fixture(scope="session")
def prelude():
    return load_prelude()


@pytest.fixture(scope="session")
def z3_available():
    if shutil.which("z3") is None:
        pytest.skip("z3 binary not on PATH")


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    key = str(int(m.group(1)))
    failed = report.failed or (report.when == "call" and report.skipped)
    if failed:
        _results[key] = "FAIL"
    elif report.when == "call" and key not in _results:
        _results[key] = "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_results, key=int):
        terminalreporter.write_line(f"criterion {key}: {_results[key]}")
