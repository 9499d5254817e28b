import pytest

from epibehave.params import baseline_params


@pytest.fixture(scope="session")
def base():
    return baseline_params()


@pytest.fixture(scope="session")
def equilibrium(base):
    from epibehave.endogenous import solve_equilibrium
    return solve_equilibrium(base)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
