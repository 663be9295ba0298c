import numpy as np
import pytest

from astrobeam import MissionConfig, PhasingConfig, generate_synthetic_belt


# Element ranges for test belts: tight enough that transfers between
# neighbours fit the acceleration bound, like the dense real catalogs the
# search is meant for. Sparse belts make every leg infeasible.
DENSE_BELT = dict(a_range_au=(2.7, 3.1), e_range=(0.0, 0.10), i_range_deg=(0.0, 2.0))


@pytest.fixture(scope="session")
def belt200():
    return generate_synthetic_belt(200, seed=42, **DENSE_BELT)


@pytest.fixture(scope="session")
def belt40():
    return generate_synthetic_belt(40, seed=11, **DENSE_BELT)


@pytest.fixture(scope="session")
def mission_config():
    return MissionConfig()


@pytest.fixture(scope="session")
def phasing_config():
    return PhasingConfig()


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def random_elliptic_elements(rng, body_id=0):
    """Random well-conditioned elliptic orbit in the heliocentric range."""
    from astrobeam import AU, OrbitalElements

    return OrbitalElements(
        semi_major_axis=rng.uniform(0.7, 4.0) * AU,
        eccentricity=rng.uniform(0.0, 0.6),
        inclination=rng.uniform(0.0, np.pi / 6),
        raan=rng.uniform(0.0, 2 * np.pi),
        arg_periapsis=rng.uniform(0.0, 2 * np.pi),
        mean_anomaly_ref=rng.uniform(0.0, 2 * np.pi),
        epoch_ref=59000.0,
        body_id=body_id,
    )
