import math

import pytest

from irsfso.geometry import SceneLayout
from irsfso.wave import BeamSource, UnitCellGrid

WAVELENGTH = 1550e-9


@pytest.fixture
def link_scene():
    """Tx at (-200, 300) m, IRS at the origin, 10 cm Rx lens at (0, 500) m."""
    return SceneLayout((-200.0, 300.0), (0.0, 0.0), 0.0, (0.0, 500.0), 0.1)


@pytest.fixture
def link_beam(link_scene):
    return BeamSource.aimed("gaussian", WAVELENGTH, 1e-3, 1.0, link_scene.tx_position, link_scene.irs_center)


def plane_wave(theta_in, wavelength=WAVELENGTH, density=1.0, distance=100.0):
    """Plane wave hitting a +y-facing surface at the origin at ``theta_in``."""
    u = (math.sin(theta_in), -math.cos(theta_in))
    origin = (-distance * u[0], -distance * u[1])
    return BeamSource.aimed("plane", wavelength, None, density, origin, (0.0, 0.0))


def small_grid(n=64, wavelength=WAVELENGTH, cell_model="point"):
    return UnitCellGrid(n, wavelength / 2, cell_model=cell_model)
