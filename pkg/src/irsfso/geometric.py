"""Geometric-optics (ray / beam-envelope) model of IRS reflection.

Free-space launch from the laser uses the Gaussian complex beam parameter
``q`` (``1/q = 1/R - j*lam/(pi*w**2)``), which is how the beam acquires its
divergence before it meets the IRS.  From the IRS on, the reflected light is
a bundle of rays: the clipped envelope is mapped by the surface and then
spreads with its wavefront curvature only, with no further diffraction.

Reflection maps ray heights by ``m = cos(theta_out)/cos(theta_in)`` and ray
angles by ``1/m`` (ABCD ``[[m, 0], [0, 1/m]]``), so the curvature becomes
``C/m**2``.  A focusing design resets the wavefront to converge on its focus.
The part of the envelope that lands on the IRS is tracked as a transverse
window, and every power fraction is an error-function integral of the
Gaussian (or a length ratio for a top-hat) over that window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import erf

from .geometry import (GeometryError, Point2D, SceneLayout, departure_angle,
                       normal_vector, tangent_vector, unit_from_angle)
from .wave import BeamSource, UnitCellGrid

_FOCUS_TOL = 1e-12


def _mass(profile, a, b, w):
    """Fraction of a unit-power envelope of radius ``w`` inside ``[a, b]``."""
    if b <= a:
        return 0.0
    if profile == "tophat":
        return float(np.clip((min(b, w) - max(a, -w)) / (2 * w), 0.0, 1.0))
    return float(0.5 * (erf(math.sqrt(2) * b / w) - erf(math.sqrt(2) * a / w)))


@dataclass(frozen=True)
class GoBeamState:
    """Beam envelope referenced to a point on its axis.

    ``source_power`` is the power of the unclipped envelope; only the part
    inside ``window`` (transverse coordinates at ``axis_origin``) is
    present, see :attr:`power`.  For ``profile="tophat"``
    ``beam_radius_at_origin`` is the half-width of a uniform strip.
    ``wavefront_curvature`` is ``1/R`` with ``R > 0`` for a diverging
    wavefront.  ``ray_optics`` selects pure ray spreading instead of
    Gaussian-beam (``q``) propagation.
    """

    axis_origin: Point2D
    axis_angle: float
    beam_radius_at_origin: float
    wavefront_curvature: float
    wavelength: float
    source_power: float
    profile: str = "gaussian"
    window: tuple = (-math.inf, math.inf)
    ray_optics: bool = False

    def __post_init__(self):
        if not self.beam_radius_at_origin > 0:
            raise ValueError("beam_radius_at_origin must be > 0")
        if self.profile not in ("gaussian", "tophat"):
            raise ValueError(f"unknown profile {self.profile!r}")

    @classmethod
    def from_source(cls, beam: BeamSource) -> "GoBeamState":
        if beam.kind == "gaussian":
            return cls(beam.axis_origin, beam.axis_angle, beam.waist_radius, 0.0,
                       beam.wavelength, beam.total_power)
        # a plane wave only becomes a finite strip at the IRS aperture;
        # total_power is its transverse density until then
        return cls(beam.axis_origin, beam.axis_angle, math.inf, 0.0, beam.wavelength,
                   beam.total_power, "tophat", ray_optics=True)

    @property
    def direction(self) -> np.ndarray:
        return unit_from_angle(self.axis_angle)

    @property
    def transverse(self) -> np.ndarray:
        return unit_from_angle(self.axis_angle + math.pi / 2)

    @property
    def power(self) -> float:
        return self.source_power * _mass(self.profile, *self.window, self.beam_radius_at_origin)

    def _inv_q(self):
        return self.wavefront_curvature - 1j * self.wavelength / (math.pi * self.beam_radius_at_origin ** 2)

    def scale_at(self, z):
        """Signed transverse magnification of the envelope after ``z`` meters."""
        z = np.asarray(z, dtype=float)
        if self.ray_optics:
            return 1 + z * self.wavefront_curvature
        q = 1 / self._inv_q() + z
        w = np.sqrt(-self.wavelength / (math.pi * np.imag(1 / q)))
        return w / self.beam_radius_at_origin

    def radius_at(self, z):
        """Envelope radius (half-width for a top-hat) at axial distance ``z``."""
        return self.beam_radius_at_origin * np.abs(self.scale_at(z))

    def curvature_at(self, z: float) -> float:
        if self.ray_optics:
            return self.wavefront_curvature / (1 + z * self.wavefront_curvature)
        return float(np.real(1 / (1 / self._inv_q() + z)))

    def window_at(self, z: float):
        s = float(self.scale_at(z))
        lo, hi = sorted((self.window[0] * s, self.window[1] * s))
        return lo, hi

    def local(self, points):
        rel = np.atleast_2d(np.asarray(points, dtype=float)) - self.axis_origin.as_array()
        return rel @ self.direction, rel @ self.transverse

    def intensity_at(self, points):
        """Transverse power density (W/m) of the envelope at ``points``."""
        z, x = self.local(points)
        s = self.scale_at(z)
        s = np.where(np.abs(s) < _FOCUS_TOL, _FOCUS_TOL, s)
        x0 = x / s
        w = self.beam_radius_at_origin
        inside = (x0 >= self.window[0]) & (x0 <= self.window[1]) & (z >= 0)
        if self.profile == "tophat":
            pdf = np.where(np.abs(x0) <= w, 1 / (2 * w), 0.0)
        else:
            pdf = math.sqrt(2 / math.pi) / w * np.exp(-2 * (x0 / w) ** 2)
        return np.where(inside, self.source_power * pdf / np.abs(s), 0.0)

    def fraction_between(self, z: float, x_lo: float, x_hi: float) -> float:
        """Fraction of :attr:`power` crossing ``[x_lo, x_hi]`` at depth ``z``."""
        total = _mass(self.profile, *self.window, self.beam_radius_at_origin)
        if total == 0:
            return 0.0
        s = float(self.scale_at(z))
        lo, hi = self.window
        if abs(s) < _FOCUS_TOL:
            # every ray passes through the axis point
            return 1.0 if x_lo <= 0 <= x_hi else 0.0
        a, b = sorted((x_lo / s, x_hi / s))
        part = _mass(self.profile, max(a, lo), min(b, hi), self.beam_radius_at_origin)
        return min(1.0, part / total)


def _outgoing_angle(design, theta_i, hit, grid, wavelength):
    focus = getattr(design, "focus", None)
    if focus is not None:
        return departure_angle(hit, grid.normal_angle, focus)
    tag = getattr(design, "design_tag", "uniform")
    grad = getattr(design, "gradient", None)
    if grad is not None and not tag.startswith("quantized"):
        # generalized Snell's law with the mean design phase slope
        sin_o = math.sin(theta_i) - float(np.mean(grad)) * wavelength / (2 * math.pi)
        if abs(sin_o) >= 1:
            raise GeometryError("design slope produces an evanescent reflection")
        return math.asin(sin_o)
    steer = getattr(design, "steer_angle", None)
    if steer is not None:
        return steer
    return theta_i


def go_reflect(beam_state: GoBeamState, grid: UnitCellGrid, design) -> GoBeamState:
    """Reflect a beam envelope off the IRS.

    ``design`` is a MirrorConfig (specular reflection about the tilted
    normal) or a PhaseProfile (its target direction or focus).  The returned
    state is referenced to the axis hit point, propagates as rays, and its
    :attr:`~GoBeamState.power` is what the IRS intercepted.
    """
    if hasattr(design, "tilt_angle"):
        grid = grid.rotated(design.tilt_angle)
        design = None
    u = beam_state.direction
    n_hat, t_hat = grid.normal, grid.tangent
    c = grid.center.as_array()
    o = beam_state.axis_origin.as_array()
    denom = float(np.dot(u, n_hat))
    if denom >= 0:
        raise GeometryError("beam axis does not travel toward the IRS front face")
    dist = float(np.dot(c - o, n_hat)) / denom
    if dist <= 0:
        raise GeometryError("IRS lies behind the beam origin")
    hit = o + dist * u
    s_hit = float(np.dot(hit - c, t_hat))
    if abs(s_hit) > grid.length / 2:
        raise GeometryError("beam axis misses the IRS segment")

    cos_i = -denom
    theta_i = math.atan2(float(np.dot(u, t_hat)), cos_i)
    trans_in = beam_state.transverse
    edges = [float(np.dot(c + e * t_hat - hit, trans_in)) for e in (-grid.length / 2, grid.length / 2)]
    clip_lo, clip_hi = sorted(edges)
    if beam_state.profile == "tophat" and math.isinf(beam_state.beam_radius_at_origin):
        w_in = max(abs(clip_lo), abs(clip_hi))
        power = beam_state.source_power * 2 * w_in
        win_lo, win_hi = clip_lo, clip_hi
        curv_in = 0.0
    else:
        w_in = float(beam_state.radius_at(dist))
        power = beam_state.source_power
        curv_in = beam_state.curvature_at(dist)
        # window carried from upstream, in units of the envelope radius at the hit
        lo, hi = beam_state.window_at(dist)
        win_lo, win_hi = max(lo, clip_lo), min(hi, clip_hi)
        if win_hi <= win_lo:
            win_lo = win_hi = 0.0

    theta_o = _outgoing_angle(design, theta_i, hit, grid, beam_state.wavelength)
    d_out = math.sin(theta_o) * t_hat + math.cos(theta_o) * n_hat
    trans_out = np.array([-d_out[1], d_out[0]])
    ratio = float(np.dot(t_hat, trans_out)) / float(np.dot(t_hat, trans_in))
    m = abs(ratio)
    focus = getattr(design, "focus", None)
    if focus is not None:
        curv_out = -1.0 / math.hypot(*(np.asarray(focus) - hit))
    else:
        curv_out = curv_in / m ** 2
    return replace(beam_state, axis_origin=Point2D(*hit), axis_angle=math.atan2(d_out[1], d_out[0]),
                   beam_radius_at_origin=m * w_in, wavefront_curvature=curv_out, source_power=power,
                   window=tuple(sorted((win_lo * ratio, win_hi * ratio))), ray_optics=True)


def lens_fraction(state: GoBeamState, lens_center, lens_length: float, lens_normal_angle: float) -> float:
    """Fraction of the beam power crossing a lens segment."""
    t_lens = tangent_vector(lens_normal_angle)
    center = np.asarray(lens_center, dtype=float)
    ends = center[None, :] + np.array([[-lens_length / 2], [lens_length / 2]]) * t_lens[None, :]
    _, x = state.local(ends)
    zc, _ = state.local(center)
    if zc[0] <= 0:
        return 0.0
    if float(np.dot(state.direction, normal_vector(lens_normal_angle))) >= 0:
        return 0.0
    return state.fraction_between(zc[0], min(x), max(x))


def go_captured_power(scene: SceneLayout, beam: BeamSource, grid: UnitCellGrid, design) -> float:
    """Power (W) reaching the Rx lens under the geometric-optics model."""
    state = go_reflect(GoBeamState.from_source(beam), grid, design)
    return state.power * lens_fraction(state, scene.rx_lens_center, scene.rx_lens_length,
                                       scene.rx_lens_normal_angle)


def go_power_density(beam: BeamSource, grid: UnitCellGrid, design, points) -> np.ndarray:
    """Reflected transverse power density (W/m) at ``points``."""
    state = go_reflect(GoBeamState.from_source(beam), grid, design)
    return state.intensity_at(points)


def gaussian_lens_capture(beam: BeamSource, lens_center, lens_length: float,
                          lens_normal_angle: float) -> float:
    """Fraction of a Gaussian beam collected by a lens with no IRS in between."""
    return lens_fraction(GoBeamState.from_source(beam), lens_center, lens_length, lens_normal_angle)
