from fractions import Fraction

import pytest

from rashba_qes.params import DimensionlessParams


@pytest.fixture
def reference_params():
    return DimensionlessParams(Fraction(1, 2), Fraction(1, 4), Fraction(3, 10))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
