from pathlib import Path

import pytest

from varwsdl import parse_pim, transform_model

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"
SCMS_PATH = FIXTURES / "scms.varsoaml.xml"

_criteria: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker.args
    if report.failed or report.when == "call":
        previous = _criteria.get(number, (title, "PASS"))[1]
        status = "FAIL" if report.failed or previous == "FAIL" else "PASS"
        _criteria[number] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria, key=int):
        title, status = _criteria[number]
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}")


@pytest.fixture(scope="session")
def scms_text() -> str:
    return SCMS_PATH.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def scms(scms_text):
    return parse_pim(scms_text)


@pytest.fixture(scope="session")
def scms_bundles(scms):
    return {p.name: p for p in transform_model(scms)}


@pytest.fixture(scope="session")
def purchasing(scms_bundles):
    return scms_bundles["purchasing"]
