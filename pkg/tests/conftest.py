import math

import pytest

from qratchet import ScaledParams

_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record a PASS/FAIL line for the acceptance summary."""

    def record(name: str, ok: bool, detail: str = "") -> bool:
        line = f"{name}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        _RESULTS.append((name, ok, detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def fig1a():
    return ScaledParams(3.0, 1.0, 1.0, math.pi / 2)
