import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from polaron_emission import (
    DriveConfig,
    PhononEnvironment,
    build_liouvillian,
    phonon_correlations,
    polaron_rates,
    steady_state,
)

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

GAMMA = 1.0 / 700.0


@pytest.fixture(scope="session")
def env4():
    return PhononEnvironment()


@pytest.fixture(scope="session")
def pc4(env4):
    return phonon_correlations(env4)


@pytest.fixture(scope="session")
def pc_free():
    return phonon_correlations(PhononEnvironment(alpha=0.0))


@pytest.fixture(scope="session")
def system4(env4):
    """Liouvillian and steady state at the reference parameter set."""
    drive = DriveConfig()
    L = build_liouvillian(drive, polaron_rates(env4, drive.omega))
    return L, steady_state(L)


def atomic_system(omega, gamma=GAMMA):
    drive = DriveConfig(omega=omega, gamma=gamma)
    L = build_liouvillian(drive, polaron_rates(PhononEnvironment(alpha=0.0), omega))
    return L, steady_state(L)


def random_density(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = a @ a.conj().T
    return rho / np.trace(rho)
