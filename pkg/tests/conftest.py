import re

import pytest

_LINES_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES_KEY] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(number, name, measured, allowed, passed)``."""
    lines = request.config.stash[_LINES_KEY]

    def record(number, name, measured, allowed, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        extra = f" ({detail})" if detail else ""
        line = f"[{status}] criterion {number}: {name}: measured={measured:.6g} allowed={allowed:.6g}{extra}"
        lines.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: (int(re.search(r"criterion (\d+)", s).group(1)), s)):
            terminalreporter.write_line(line)
