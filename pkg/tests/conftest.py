import pytest

from lsdlab.arith import sieve_spf


@pytest.fixture(scope="session")
def spf_small():
    return sieve_spf(2 * 10**5)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
