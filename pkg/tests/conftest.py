import numpy as np
import pytest

from roughpam import HurstParam, InitialCondition, ModelParams, SpectralGrid


@pytest.fixture
def h35():
    return HurstParam(0.35)


@pytest.fixture
def h30():
    return HurstParam(0.3)


@pytest.fixture
def params_const(h35):
    """Default acceptance-style model: h=0.35, kappa=1, constant initial data."""
    return ModelParams(hurst=h35, kappa=1.0, horizon=0.25,
                       u0=InitialCondition.constant(1.0))


@pytest.fixture
def params_bump(h35):
    return ModelParams(hurst=h35, kappa=1.0, horizon=0.25,
                       u0=InitialCondition.gaussian_bump(center=0.0, width=1.0, amplitude=1.0))


@pytest.fixture
def small_grid():
    """Coarse grid that keeps unit tests fast."""
    return SpectralGrid(domain_length=32.0, mode_cutoff=128, dt=1e-3)
