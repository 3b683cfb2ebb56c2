import pytest

from pvtrack.assignment import available_backends, set_backend

ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture(params=available_backends())
def backend(request):
    previous = set_backend(request.param)
    yield request.param
    set_backend(previous)


class _Criterion:
    def __init__(self, key, title):
        self.key, self.title, self.notes = key, title, ""

    def note(self, text):
        self.notes = text

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        line = f"{status}  {self.key}: {self.title}"
        if self.notes:
            line += f"  [{self.notes}]"
        ACCEPTANCE_LINES[self.key] = line
        print("\n" + line)
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES, key=lambda k: (len(k), k)):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
