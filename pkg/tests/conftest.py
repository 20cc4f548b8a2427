import numpy as np
import pytest

@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def exact_batch(mc, T, N):
    """ImuBatch holding the exact subinterval integrals of polynomial motion ``mc``."""
    from fractions import Fraction

    from inavlab.strapdown import ImuBatch

    T = Fraction(T).limit_denominator(10**9)
    w, f = mc.omega_poly.integrate(), mc.force_poly.integrate()
    e = [T * k / N for k in range(N + 1)]
    dth = [[float(w(e[k + 1])[i] - w(e[k])[i]) for i in range(3)] for k in range(N)]
    dv = [[float(f(e[k + 1])[i] - f(e[k])[i]) for i in range(3)] for k in range(N)]
    return ImuBatch(np.array(dth), np.array(dv), float(T)), T


def as_float(v):
    return np.array([float(x) for x in v])


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
