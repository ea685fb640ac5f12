import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from phm.cloud import PointCloud
from phm.synthetic import synthetic_cloud

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=30,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def random_cloud(n: int, seed: int, extent: float = 10.0) -> PointCloud:
    """Unstructured random cloud with independent random colors."""
    rng = np.random.default_rng(seed)
    pos = rng.uniform(0.0, extent, size=(n, 3))
    col = rng.integers(0, 256, size=(n, 3), dtype=np.uint8)
    return PointCloud.from_arrays(pos, col)


@pytest.fixture
def small_cloud() -> PointCloud:
    return random_cloud(60, seed=11)


@pytest.fixture
def textured_cloud() -> PointCloud:
    return synthetic_cloud(400, seed=5)
