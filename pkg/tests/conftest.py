import numpy as np
import pytest


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def fd_gradient(f, x, h=1e-6):
    """Central-difference gradient of a real function of a complex array.

    Returns ``df/dRe + 1j * df/dIm`` entrywise.
    """
    x = np.array(x, dtype=complex)
    g = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        for unit in (1.0, 1j):
            xp = x.copy()
            xm = x.copy()
            xp[idx] += h * unit
            xm[idx] -= h * unit
            g[idx] += unit * (f(xp) - f(xm)) / (2 * h)
    return g


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in mod.REPORT:
            terminalreporter.write_line(line)
