import numpy as np
import pytest

from tpdicke.model import ModelParams

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def strong_params():
    """kappa = omega_0 = omega_c, gamma_down = gamma_phi = 3 omega_c, N = 100."""
    return ModelParams(omega_c=1.0, omega_0=1.0, g=4.0, n_qubits=100, kappa=1.0, gamma_down=3.0, gamma_phi=3.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_params(rng, n_choices=(10, 100, 1000)):
    """Parameter ratios log-uniform in [0.1, 10] (omega_c = 1)."""
    r = lambda: float(10 ** rng.uniform(-1, 1))  # noqa: E731
    return ModelParams(1.0, r(), r(), int(rng.choice(n_choices)), r(), r(), r())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
