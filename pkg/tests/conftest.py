import numpy as np
import pytest

from hodmd.tensor import TimeGrid

DT = 8e-3

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def grid20():
    return TimeGrid(dt=DT, count=20)


def modal_signal(rng, eigenvalues, n_space, times, real=True):
    """Sum of exponential modes with random complex spatial shapes.

    Complex eigenvalues are paired with their conjugates when ``real`` is set.
    """
    out = np.zeros((n_space, times.size))
    for lam in eigenvalues:
        shape = rng.normal(size=n_space) + (1j * rng.normal(size=n_space) if lam.imag else 0)
        term = np.outer(shape, np.exp(lam * times))
        out += 2 * term.real if (real and lam.imag) else term.real
    return out


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
