import numpy as np
import pytest

from mimowave import Scenario, Waveform, chirp_reference


@pytest.fixture
def reference_scenario():
    """The 4x8 antenna, 8-sample scene with three 30 dB clutter sources."""
    return Scenario(
        n_tx=4, n_rx=8, n_samples=8,
        target_angle=np.deg2rad(15.0),
        target_power_db=10.0,
        interferers=(
            (np.deg2rad(-50.0), 30.0),
            (np.deg2rad(-10.0), 30.0),
            (np.deg2rad(40.0), 30.0),
        ),
        noise_power_db=0.0,
    )


@pytest.fixture
def reference_chirp(reference_scenario):
    return chirp_reference(reference_scenario.n_tx, reference_scenario.n_samples)


def random_scenario(rng, max_code=6, max_interferers=2):
    """Small random scene for oracle-scale checks."""
    while True:
        n_tx = int(rng.integers(1, 4))
        n_samples = int(rng.integers(1, 4))
        if 1 <= n_tx * n_samples <= max_code:
            break
    n_int = int(rng.integers(0, max_interferers + 1))
    return Scenario(
        n_tx=n_tx,
        n_rx=int(rng.integers(2, 6)),
        n_samples=n_samples,
        target_angle=float(rng.uniform(-1.2, 1.2)),
        target_power_db=float(rng.uniform(0, 15)),
        interferers=tuple(
            (float(rng.uniform(-1.5, 1.5)), float(rng.uniform(10, 30)))
            for _ in range(n_int)
        ),
        noise_power_db=0.0,
    )


def random_constant_modulus(rng, scenario):
    phases = rng.uniform(0, 2 * np.pi, scenario.code_length)
    return Waveform(
        scenario.modulus * np.exp(1j * phases),
        modulus=scenario.modulus,
        constant_modulus=True,
    )
