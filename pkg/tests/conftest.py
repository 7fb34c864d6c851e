import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from freequot.schreier import preset_relators, todd_coxeter, truncated_quotient  # noqa: E402
from freequot.words import parse_relators  # noqa: E402

settings.register_profile("ci", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


@pytest.fixture(scope="session")
def grid():
    g, _ = truncated_quotient(2, parse_relators("abAB", 2), 6, 2)
    return g


@pytest.fixture(scope="session")
def tree5():
    g, _ = truncated_quotient(2, [], 5, 1)
    return g


@pytest.fixture(scope="session")
def powers():
    """Windows of F_2 / <<a^k, b^k>> keyed by k."""
    out = {}
    for k in (4, 6, 8):
        out[k], _ = truncated_quotient(2, preset_relators("powers", 2, k), k, 2)
    return out


@pytest.fixture(scope="session")
def klein():
    return todd_coxeter(2, preset_relators("klein", 2))


@pytest.fixture(scope="session")
def mod2():
    return todd_coxeter(2, preset_relators("mod2", 2))


# acceptance lines are collected here and echoed in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert."""

    def record(label: str, ok: bool, detail: str = ""):
        line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
