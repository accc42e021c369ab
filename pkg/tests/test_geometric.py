import math

import numpy as np
import pytest
from scipy.integrate import quad

from irsfso.designs import MirrorConfig, focusing_profile, linear_profile, mirror_tilt_for
from irsfso.geometric import (GoBeamState, gaussian_lens_capture, go_captured_power, go_power_density,
                              go_reflect, lens_fraction)
from irsfso.geometry import AnglePair, GeometryError, scene_angles
from irsfso.wave import BeamSource, UnitCellGrid, incident_power

from conftest import WAVELENGTH, plane_wave
from oracles import beam_radius, gaussian_power_between


def test_free_space_radius_follows_gaussian_optics():
    state = GoBeamState.from_source(BeamSource("gaussian", WAVELENGTH, 1e-3, 1.0, (0, 0), 0.0))
    for z in (0.0, 10.0, 860.0):
        assert state.radius_at(z) == pytest.approx(beam_radius(1e-3, WAVELENGTH, z), rel=1e-12)


def test_lens_capture_without_irs_matches_erf():
    beam = BeamSource("gaussian", WAVELENGTH, 1e-3, 1.0, (0.0, 0.0), math.pi / 2)
    got = gaussian_lens_capture(beam, (0.0, 360.0), 0.1, math.pi)
    w = beam_radius(1e-3, WAVELENGTH, 360.0)
    assert got == pytest.approx(gaussian_power_between(-0.05, 0.05, w), rel=1e-12)


def test_clip_fraction_matches_numerical_integral(link_beam):
    grid = UnitCellGrid.spanning(0.2, WAVELENGTH / 2)
    state = go_reflect(GoBeamState.from_source(link_beam), grid, MirrorConfig(0.0))
    # intercepted envelope power, integrated numerically along the surface
    d1 = math.hypot(200, 300)
    w = beam_radius(1e-3, WAVELENGTH, d1)
    cos_i = 300 / d1
    p, _ = quad(lambda s: math.sqrt(2 / math.pi) / w * math.exp(-2 * (s * cos_i / w) ** 2) * cos_i,
                 -grid.length / 2, grid.length / 2)
    assert state.power == pytest.approx(p, rel=1e-9)
    assert state.power == pytest.approx(incident_power(link_beam, grid), rel=1e-3)


def test_specular_direction_of_mirror(link_scene, link_beam):
    grid = UnitCellGrid.spanning(0.5, WAVELENGTH / 2)
    tilt = mirror_tilt_for(scene_angles(link_scene))
    state = go_reflect(GoBeamState.from_source(link_beam), grid, tilt)
    assert state.axis_angle == pytest.approx(math.pi / 2, abs=1e-12)


def test_focusing_delivers_intercepted_power(link_scene, link_beam):
    grid = UnitCellGrid.spanning(0.05, 10 * WAVELENGTH)
    prof = focusing_profile(grid, link_beam, link_scene.rx_lens_center)
    state = go_reflect(GoBeamState.from_source(link_beam), grid, prof)
    assert go_captured_power(link_scene, link_beam, grid, prof) == pytest.approx(state.power, rel=1e-12)


def test_plane_wave_strip_density():
    ti = math.radians(30)
    grid = UnitCellGrid.spanning(0.2, WAVELENGTH / 2)
    beam = plane_wave(ti)
    prof = linear_profile(grid, AnglePair(ti, 0.0), WAVELENGTH)
    pts = np.array([[0.0, 200.0], [0.099, 200.0], [0.11, 200.0]])
    dens = go_power_density(beam, grid, prof, pts)
    assert dens[0] == pytest.approx(math.cos(ti), rel=1e-9)
    assert dens[1] == pytest.approx(math.cos(ti), rel=1e-9)
    assert dens[2] == 0.0


def test_captured_never_exceeds_source(link_scene, link_beam):
    for length in (1e-3, 0.05, 0.5, 2.0):
        grid = UnitCellGrid.spanning(length, 10 * WAVELENGTH)
        for design in (mirror_tilt_for(scene_angles(link_scene)),
                       focusing_profile(grid, link_beam, link_scene.rx_lens_center)):
            assert 0 <= go_captured_power(link_scene, link_beam, grid, design) <= 1.0 + 1e-12


def test_axis_missing_irs_rejected(link_beam):
    grid = UnitCellGrid.spanning(0.1, WAVELENGTH / 2, center=(5.0, 0.0))
    with pytest.raises(GeometryError):
        go_reflect(GoBeamState.from_source(link_beam), grid, MirrorConfig(0.0))


def test_lens_behind_beam_gets_nothing():
    state = GoBeamState.from_source(BeamSource("gaussian", WAVELENGTH, 1e-3, 1.0, (0.0, 0.0), math.pi / 2))
    assert lens_fraction(state, (0.0, -10.0), 0.1, 0.0) == 0.0
