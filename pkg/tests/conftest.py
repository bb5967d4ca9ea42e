import math

import numpy as np
import pytest

from etj import corpus
from etj.kernels import KernelSpec, build_kernel, fejer_kernel, kernel_for_order
from etj.spaces import PeriodicGrid
from etj.weights import make_weight


@pytest.fixture(scope="session")
def grid():
    return PeriodicGrid(4096)


@pytest.fixture(scope="session")
def small_grid():
    return PeriodicGrid(256)


@pytest.fixture(scope="session")
def cubic_kernel():
    """Kernel for alpha(t) = (1+|t|)^3."""
    return build_kernel(KernelSpec(make_weight("polynomial", M=1, k=3)))


@pytest.fixture(scope="session")
def periodic_kernels():
    """Kernels for alpha = (1+|t|)^(k+2), k = 1..5 (orders used by the derivative checks)."""
    one = make_weight("constant")
    return {k: kernel_for_order(one, k) for k in range(1, 6)}


@pytest.fixture(scope="session")
def fejer():
    return {m: fejer_kernel(m) for m in (1, 2, 3)}


@pytest.fixture(scope="session")
def periodic_corpus(grid):
    return {name: corpus.make(name, grid, 2, seed=11) for name in corpus.PERIODIC_NAMES}


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


@pytest.fixture
def close():
    return rel


# -- acceptance summary: one line per criterion, printed after the run


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def criterion(request):
    """Record ``(number, ok, detail)`` for the acceptance summary and assert."""

    def report(number, title, ok, detail=""):
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}" + (f": {detail}" if detail else "")
        request.config._acceptance_lines.append((number, line))
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
