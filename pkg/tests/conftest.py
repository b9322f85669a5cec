import pytest

from oinlsim.grid_fields import make_grid
from oinlsim.physical_params import (AtomSpecies, BeamConfig, ProtocolConfig,
                                     scale_to_dimensionless)
from oinlsim.protocol import MODE_INTEGRAL, MODE_NUMERIC, compute_ground_state


@pytest.fixture(scope="session")
def species():
    return AtomSpecies.rubidium87()


@pytest.fixture(scope="session")
def doughnut():
    # reference trap: Omega0 = 3.15e10 rad/s, Delta = 1.1e15 rad/s, w = 10 um
    return BeamConfig("doughnut", 3.15e10, 1.1e15, 10e-6)


@pytest.fixture(scope="session")
def protocol_config():
    return ProtocolConfig(n_atoms=1e5, l_z=20e-6, t_imprint=10e-6)


@pytest.fixture(scope="session")
def scaled(species, doughnut, protocol_config):
    return scale_to_dimensionless(species, doughnut, protocol_config)


@pytest.fixture(scope="session")
def grid256():
    return make_grid(256, 256, 24.0, 24.0)


@pytest.fixture(scope="session")
def grid128():
    return make_grid(128, 128, 24.0, 24.0)


@pytest.fixture(scope="session")
def ground_harmonic(scaled, grid256):
    """Relaxed ground state in the ideal harmonic trap (256^2, defaults)."""
    return compute_ground_state(scaled, MODE_INTEGRAL, grid256)


@pytest.fixture(scope="session")
def ground_harmonic_128(scaled, grid128):
    """Smaller harmonic-trap ground state for solver property checks."""
    return compute_ground_state(scaled, MODE_INTEGRAL, grid128)


@pytest.fixture(scope="session")
def ground_doughnut(scaled, grid256):
    """Relaxed ground state in the exact doughnut potential (256^2, defaults)."""
    return compute_ground_state(scaled, MODE_NUMERIC, grid256)
