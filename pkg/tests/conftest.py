import numpy as np
import pytest


def reference_generator(phases, gamma_L, gamma_R):
    """Entry-by-entry generator used as an independent check of the vectorized builder."""
    n = len(phases)
    g = np.zeros((n, n), dtype=complex)
    for mu in range(n):
        for nu in range(n):
            if mu == nu:
                g[mu, nu] = -(gamma_L + gamma_R) / 2
            elif nu < mu:
                g[mu, nu] = -gamma_R * np.exp(-1j * (phases[mu] - phases[nu]))
            else:
                g[mu, nu] = -gamma_L * np.exp(-1j * (phases[nu] - phases[mu]))
    return g


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
