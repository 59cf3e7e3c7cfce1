import numpy as np
import pytest

from spinqed.fock_space import enumerate_basis
from spinqed.hamiltonian import assemble, build_model
from spinqed.momentum_grid import ChiProfile, ModeSet, SpinConfig


def single_mode_model(freq=1.5, couplings=(0.3, -0.2 + 0.1j, 0.4j), beta=(0.0, 0.0, 1.0), n_max=4):
    """N = 1 spin and one photon mode with hand-chosen couplings."""
    cfg = SpinConfig(beta, [(0.0, 0.0, 0.0)])
    modes = ModeSet(np.array([freq]), np.array(couplings, dtype=complex).reshape(1, 3, 1))
    return assemble(modes, cfg, enumerate_basis(1, n_max))


@pytest.fixture(scope="session")
def bump():
    return ChiProfile.bump()


@pytest.fixture(scope="session")
def polygauss():
    return ChiProfile.polygauss()


@pytest.fixture(scope="session")
def two_spins():
    return SpinConfig((0.2, -0.1, 1.0), [(0.0, 0.0, 0.0), (0.7, -0.2, 0.1)])


@pytest.fixture(scope="session")
def small_model(bump, two_spins):
    return build_model(bump, two_spins, n_max=4)


@pytest.fixture(scope="session")
def one_spin_model(bump):
    return build_model(bump, SpinConfig((0, 0, 1), [(0, 0, 0)]), n_max=6)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split()[0])):
            terminalreporter.write_line(line)
