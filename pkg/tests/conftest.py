import numpy as np
import pytest
from hypothesis import strategies as st

from qudit_unruh import QuditState


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def qudits(min_d=2, max_d=4):
    """Hypothesis strategy for random pure qudits (drawn from a seed)."""
    return st.builds(
        lambda d, seed: QuditState.random(d, seed),
        st.integers(min_d, max_d),
        st.integers(0, 2**32 - 1),
    )


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion."""

    def report(number, title, ok, detail):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
