import math
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))  # for oracles.py

from vdwgrating import BeamState, GratingGeometry, Potential, \
    TaucLorentzParams

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")


@pytest.fixture(scope="session")
def geometry():
    """Measured grating cross section used throughout the tests."""
    return GratingGeometry(period=100.0, slit_width=66.8, bar_depth=53.0,
                           wedge_angle=math.radians(11.0))


@pytest.fixture(scope="session")
def he_beam():
    return BeamState(mass_u=4.002602, velocity=2347.0, dv_over_u=0.03)


@pytest.fixture(scope="session")
def ne_beam():
    return BeamState(mass_u=20.1797, velocity=873.0, dv_over_u=0.03)


@pytest.fixture(scope="session")
def potential():
    return Potential(c3=4.1)


@pytest.fixture(scope="session")
def tl_params():
    """Tauc-Lorentz parameters of the silicon nitride surface."""
    return TaucLorentzParams(band_gap=2.29, strength=74.5, resonance=7.17,
                             width=7.62)


@pytest.fixture(scope="session")
def he_config_path():
    return os.path.join(CONFIG_DIR, "he_star.cfg")


@pytest.fixture(scope="session")
def ne_config_path():
    return os.path.join(CONFIG_DIR, "ne_star.cfg")
