import numpy as np
import pytest

from app.schemas.frame import FrameParams


@pytest.fixture
def small_params() -> FrameParams:
    """M=16, N=4 at 1 MHz: a 64-sample frame with 16 us slots."""
    return FrameParams.from_grid(1e6, 16, 4)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
