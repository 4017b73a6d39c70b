"""Shared fixtures and the acceptance-criteria report hook."""

from contextlib import contextmanager

import numpy as np
import pytest

from submax import kernel_from_matrix

# 3-point kernel used by many hand-computed checks
KERNEL_3 = np.array([
    [1.0, 0.8, 0.1],
    [0.8, 1.0, 0.2],
    [0.1, 0.2, 1.0],
])


@pytest.fixture
def kernel3():
    return kernel_from_matrix(KERNEL_3)


def random_points(seed: int, n: int, dims: int = 3) -> np.ndarray:
    return np.random.default_rng(seed).normal(size=(n, dims))


def random_kernel(seed: int, n: int):
    """Random dense similarity kernel via random points, unit diagonal."""
    from submax import build_dense_kernel
    return build_dense_kernel(random_points(seed, n), "euclidean")


# ---------------------------------------------------------------------------
# acceptance reporting: each acceptance test wraps its asserts in
# `with criterion(k, title):` and the terminal summary prints one
# pass/fail line per criterion.

_ACCEPTANCE: dict[int, tuple[str, bool]] = {}


@contextmanager
def criterion(number: int, title: str):
    _ACCEPTANCE[number] = (title, False)
    yield
    _ACCEPTANCE[number] = (title, True)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[number]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number:2d}: {title}")
