import contextlib
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_results: dict[str, tuple[bool, str]] = {}


class _Criterion:
    def __init__(self, name: str) -> None:
        self.name = name
        self.detail = ""


@pytest.fixture
def criterion():
    """Context manager recording a named acceptance criterion as PASS or FAIL."""

    @contextlib.contextmanager
    def run(name: str):
        c = _Criterion(name)
        try:
            yield c
        except BaseException:
            _results[name] = (False, c.detail)
            raise
        _results[name] = (True, c.detail)

    return run


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_results, key=lambda s: int(s.split()[0])):
        ok, detail = _results[name]
        line = f"{'PASS' if ok else 'FAIL'}  {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
