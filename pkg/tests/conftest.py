import pytest

_CRITERIA = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the end-of-run table."""
    store = request.config.stash.setdefault(_CRITERIA, {})

    def record(number: int, title: str, passed: bool, detail: str, elapsed: float, budget: float):
        ok = bool(passed) and elapsed < budget
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}  {title}: {detail} [{elapsed:.1f}s / {budget:g}s]"
        store[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_CRITERIA, {})
    if store:
        terminalreporter.section("acceptance criteria")
        for k in sorted(store):
            terminalreporter.write_line(store[k])
