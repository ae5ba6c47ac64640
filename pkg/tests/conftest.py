import pytest
from hypothesis import strategies as st

from tempagg.process import ArmaParams

coef = st.floats(-0.95, 0.95, allow_nan=False)
arma = st.builds(ArmaParams, coef, coef, st.floats(0.1, 5.0))


def rel_err(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def report(number: int, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {detail}"
        request.config.stash.setdefault(_ACCEPTANCE, []).append((number, line))
        print(line, flush=True)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
