import numpy as np
import pytest

from spde_sdk.config import ExperimentConfig


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_config():
    """A configuration that runs every harness path in well under a second."""
    return ExperimentConfig(
        T=0.5,
        gamma=0.7,
        spectrum="white",
        datum="sine",
        modes=(4, 8),
        taus=(1 / 8, 1 / 16),
        reference_tau=1 / 32,
        samples=4,
        master_seed=7,
        probe_levels=8,
        probe_blocks=8,
        probe_modes=2 ** 12,
    ).validate()
