import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ahconserved import generate, sphere_grid  # noqa: E402

ACCEPTANCE_LINES = {}


@pytest.fixture
def grid():
    return sphere_grid(32)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_data():
    return generate("random_bandlimited", 32, seed=3)


@pytest.fixture
def rest_data():
    return generate("random_bandlimited", 32, seed=4, zero_momentum=True)


@pytest.fixture
def criterion():
    """Record a one-line verdict for an acceptance criterion.

    Usage: ``criterion(n, title, checks)`` where ``checks`` maps a label to
    ``(observed, bound)`` or to a bool.  Prints the line, stores it for the
    session summary and asserts.
    """

    def record(n, title, checks):
        failed = []
        parts = []
        for label, value in checks.items():
            if isinstance(value, tuple):
                observed, bound = value
                ok = bool(observed <= bound)
                parts.append(f"{label}={observed:.2e}<={bound:.0e}")
            else:
                ok = bool(value)
                parts.append(f"{label}={'ok' if ok else 'no'}")
            if not ok:
                failed.append(label)
        verdict = "PASS" if not failed else "FAIL"
        line = f"criterion {n:>2} {verdict}  {title}: " + ", ".join(parts)
        ACCEPTANCE_LINES[n] = line
        print(line)
        assert not failed, f"criterion {n} failed: {failed}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
