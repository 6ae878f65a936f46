import numpy as np
import pytest

_RESULTS = pytest.StashKey[dict]()


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    table = request.config.stash.setdefault(_RESULTS, {})

    def record(number: int, passed: bool, detail: str) -> None:
        line = f"{'PASS' if passed else 'FAIL'} criterion {number:>2}: {detail}"
        table[number] = line
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    table = config.stash.get(_RESULTS, {})
    if not table:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(table):
        terminalreporter.write_line(table[number])
