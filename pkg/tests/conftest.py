import contextlib

import pytest

from grouprand.rng import RandomStream

_LINES = pytest.StashKey[list]()


@pytest.fixture
def stream():
    return RandomStream(20240611)


class Criterion:
    """Collects the sub-checks of one acceptance criterion."""

    def __init__(self, label):
        self.label = label
        self.results = []

    def check(self, what, ok, detail=""):
        self.results.append((what, bool(ok), detail))

    def line(self, error=None):
        ok = error is None and all(r[1] for r in self.results)
        parts = [f"{'ok' if r[1] else 'BAD'} {r[0]}" + (f" ({r[2]})" if r[2] else "") for r in self.results]
        if error is not None:
            parts.append(f"error {error!r}")
        return ok, f"{'PASS' if ok else 'FAIL'} {self.label}: " + "; ".join(parts)


@pytest.fixture
def criterion(request):
    """``with criterion("3 naive vs fancy") as c: c.check(...)`` records one PASS/FAIL line."""
    lines = request.config.stash.setdefault(_LINES, [])

    @contextlib.contextmanager
    def run(label):
        c = Criterion(label)
        try:
            yield c
        except Exception as e:
            lines.append(c.line(e)[1])
            print(lines[-1])
            raise
        ok, text = c.line()
        lines.append(text)
        print(text)
        assert ok, text

    return run


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for text in lines:
            terminalreporter.write_line(text)
