import pytest
from hypothesis import settings

from clairaut import _backend

settings.register_profile("repo", derandomize=True, deadline=None, print_blob=True)
settings.load_profile("repo")

BACKENDS = _backend.available()


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


class AcceptanceLog:
    def __init__(self):
        self.lines = {}

    def record(self, number, title, ok, detail):
        self.lines[number] = f"{'PASS' if ok else 'FAIL'} {number:>2} {title}: {detail}"
        return ok


_LOG = AcceptanceLog()


@pytest.fixture(scope="session")
def acceptance():
    return _LOG


def pytest_terminal_summary(terminalreporter):
    if _LOG.lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_LOG.lines):
            terminalreporter.write_line(_LOG.lines[k])
