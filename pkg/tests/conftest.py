import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from primecurves._kernels import numpy_backend  # noqa: E402

try:
    from primecurves._kernels import numba_backend
except ImportError:  # pragma: no cover
    numba_backend = None

BACKENDS = [numpy_backend] + ([numba_backend] if numba_backend is not None else [])


@pytest.fixture(params=BACKENDS, ids=lambda b: b.NAME)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20260116)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance criteria (slow)")


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    """Record one PASS/FAIL line per criterion; all lines are repeated in the terminal summary."""

    def log(criterion: int, ok: bool, detail: str = "") -> bool:
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
