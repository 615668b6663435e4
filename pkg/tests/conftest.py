import numpy as np
import pytest

from mbnfc import BandConfig, LinkConfig


@pytest.fixture(scope="session")
def small_link():
    """Default band plan scaled down 100x: fast enough for unit tests,
    same oversampling ratios as the shipped default configuration."""
    return LinkConfig(
        bands=(BandConfig(2_500_000, 40_000), BandConfig(4_000_000, 40_000)),
        rf_sample_rate_hz=160_000_000, sdm_order=2, backoff=0.9, seed=1)


@pytest.fixture(scope="session")
def small_payload():
    rng = np.random.default_rng(5)
    return rng.integers(0, 256, 200, dtype=np.uint8).tobytes()
