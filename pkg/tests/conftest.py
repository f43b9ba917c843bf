import pytest

from npcchain.pipeline import pipeline_yk
from npcchain.templates import build_xk


@pytest.fixture(scope="session")
def y1():
    return pipeline_yk(1)


@pytest.fixture(scope="session")
def y1_action(y1):
    return y1.monodromy.action


@pytest.fixture(scope="session")
def templates():
    return {k: build_xk(k) for k in (1, 2, 3)}


def pytest_configure(config):
    config.acceptance_lines = {}


@pytest.fixture
def verdict(request):
    """Record one pass/fail line for an acceptance criterion."""
    lines = request.config.acceptance_lines

    class _Verdict:
        def __init__(self):
            self.n = None
            self.note = ""

        def __call__(self, n, title):
            self.n, self.title = n, title
            lines[n] = f"criterion {n:2d} FAIL  {title}"
            return self

        def ok(self, note=""):
            lines[self.n] = f"criterion {self.n:2d} PASS  {self.title}" + (f"  [{note}]" if note else "")
            print(lines[self.n])

    return _Verdict()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
