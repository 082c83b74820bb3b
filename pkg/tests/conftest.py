import math

import pytest

from mwphase.squid import SquidDevice

_ACCEPTANCE: list[str] = []


@pytest.fixture
def device():
    """Reference three-SQUID device with the fitted line length."""
    return SquidDevice(0.7e-6, 2.2e-6, 26e-15, 50.0, 2.01, 2 * math.pi * 6.3e9)


@pytest.fixture(scope="session")
def verdict():
    """Record and print one PASS/FAIL line per acceptance criterion, then assert."""

    def record(label: str, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {label}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return record


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: lattice time evolutions taking minutes")


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
