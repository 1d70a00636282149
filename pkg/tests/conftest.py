import math

import numpy as np
import pytest

ACCEPTANCE_LINES = []


def series_coherent(alpha, n_max):
    """Brute-force truncated coherent expansion, renormalized (test oracle)."""
    amps = np.array(
        [alpha**n / math.sqrt(math.factorial(n)) for n in range(n_max + 1)], dtype=complex
    )
    return amps / np.linalg.norm(amps)


def closed_visibility(k, omega_m, t, gamma=0.0):
    return math.exp(-k * k * (1 - math.cos(omega_m * t)) - gamma * t)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def random_unit(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_hermitian(rng, n):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (m + m.conj().T) / 2


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
