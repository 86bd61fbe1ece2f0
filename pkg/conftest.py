"""
Shared fixtures for the photon-gbd test suite
"""
import os

os.environ.setdefault('PHOTON_GBD_ENV', 'testing')

import pytest  # noqa: E402

from photon_gbd.models import (  # noqa: E402
    BeamState, DeviceKind, PhaseVolume, SplitDevice, SplitSpec, StatModel
)


@pytest.fixture
def app():
    """Flask app for pytest-flask's client fixture"""
    from photon_gbd.app import app as flask_app
    flask_app.config['TESTING'] = True
    return flask_app


@pytest.fixture
def be_model():
    """Bose-Einstein statistics with one photon per cell"""
    return StatModel.bose_einstein(1.0)


@pytest.fixture
def poisson_model():
    """Poisson statistics with unit density"""
    return StatModel.poisson(1.0)


@pytest.fixture
def half_split():
    return SplitSpec.from_alpha(0.5)


@pytest.fixture
def be_beam(be_model):
    """BE beam in S = 2 with w = 1"""
    return BeamState(be_model, PhaseVolume(2.0))


@pytest.fixture
def beamsplitter():
    return SplitDevice(DeviceKind.BEAMSPLITTER, 0.5)
