import pytest

from lifolex import BitString


def B(s):
    return BitString.from_bits(s)


@pytest.fixture
def bits():
    return B


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
