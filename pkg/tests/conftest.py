import pytest

from blochnorm.common import Params

_acceptance_lines: list[str] = []


@pytest.fixture
def report():
    """Record one acceptance line; printed in the terminal summary."""

    def record(criterion: int, title: str, passed: bool, detail: str) -> bool:
        status = "PASS" if passed else "FAIL"
        _acceptance_lines.append(f"[{status}] criterion {criterion:>2}: {title} ({detail})")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_acceptance_lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
        terminalreporter.write_line(line)


@pytest.fixture(params=[(2, 0.0), (2, 1.0), (3, 0.5), (5, -0.5), (4, 2.5)], ids=lambda v: f"n{v[0]}a{v[1]}")
def params(request):
    return Params(*request.param)
