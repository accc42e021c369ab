"""2D scene layout and angle conventions.

All positions are in meters and all angles in radians.

Conventions
-----------
A segment (the IRS or a receive lens) is described by its center and by the
angle of its surface normal measured from the +y axis, positive
counter-clockwise.  For a normal angle ``a`` the unit normal is
``(-sin a, cos a)`` and the unit tangent is ``(cos a, sin a)``; with ``a = 0``
the segment lies along the x-axis and faces +y.

Incidence and reflection angles are measured from the IRS normal and are
positive toward the tangent direction (+x for an un-rotated IRS).  The
incidence angle is the angle of the *propagation* direction, so a Tx at
negative x illuminating an IRS at the origin has a positive incidence angle,
and specular reflection means ``theta_i == theta_r``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class GeometryError(ValueError):
    """Raised for degenerate or physically invalid placements."""


class Point2D(NamedTuple):
    x: float
    y: float

    def __sub__(self, other):
        return np.array([self.x - other[0], self.y - other[1]])

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


def normal_vector(angle: float) -> np.ndarray:
    return np.array([-math.sin(angle), math.cos(angle)])


def tangent_vector(angle: float) -> np.ndarray:
    return np.array([math.cos(angle), math.sin(angle)])


def direction_angle(vec) -> float:
    """Math-convention angle (from +x, counter-clockwise) of a 2D vector."""
    return math.atan2(vec[1], vec[0])


def unit_from_angle(angle: float) -> np.ndarray:
    return np.array([math.cos(angle), math.sin(angle)])


@dataclass(frozen=True)
class AnglePair:
    """Incidence and reflection angles measured from the IRS normal."""

    theta_i: float
    theta_r: float

    def __post_init__(self):
        for name in ("theta_i", "theta_r"):
            val = getattr(self, name)
            if not math.isfinite(val) or abs(val) >= math.pi / 2:
                raise GeometryError(f"{name}={val!r} must satisfy |angle| < pi/2")


@dataclass(frozen=True)
class SceneLayout:
    """Placement of Tx, IRS and Rx lens in the plane.

    Attributes
    ----------
    tx_position : Point2D
    irs_center : Point2D
    irs_normal_angle : float
        Angle of the IRS normal from +y (rad, counter-clockwise positive).
    rx_lens_center : Point2D
    rx_lens_length : float
        Lens length (m).
    rx_lens_normal_angle : float
        Angle of the lens normal from +y.  A lens parallel to the x-axis
        facing down toward an IRS below it has normal angle ``pi``.
    """

    tx_position: Point2D
    irs_center: Point2D
    irs_normal_angle: float
    rx_lens_center: Point2D
    rx_lens_length: float
    rx_lens_normal_angle: float = math.pi

    def __post_init__(self):
        object.__setattr__(self, "tx_position", Point2D(*map(float, self.tx_position)))
        object.__setattr__(self, "irs_center", Point2D(*map(float, self.irs_center)))
        object.__setattr__(self, "rx_lens_center", Point2D(*map(float, self.rx_lens_center)))
        coords = [*self.tx_position, *self.irs_center, *self.rx_lens_center,
                  self.irs_normal_angle, self.rx_lens_normal_angle]
        if not all(math.isfinite(c) for c in coords):
            raise GeometryError("scene coordinates must be finite")
        if not self.rx_lens_length > 0:
            raise GeometryError("rx_lens_length must be > 0")
        n = normal_vector(self.irs_normal_angle)
        h_tx = float(np.dot(self.tx_position - self.irs_center, n))
        h_rx = float(np.dot(self.rx_lens_center - self.irs_center, n))
        if h_tx * h_rx <= 0:
            raise GeometryError(
                "tx_position and rx_lens_center must lie strictly on the same side of the IRS line")

    @property
    def irs_normal(self) -> np.ndarray:
        return normal_vector(self.irs_normal_angle)

    @property
    def irs_tangent(self) -> np.ndarray:
        return tangent_vector(self.irs_normal_angle)

    def with_irs_rotation(self, tilt: float) -> "SceneLayout":
        """Copy of the layout with the IRS rotated about its center."""
        return SceneLayout(self.tx_position, self.irs_center, self.irs_normal_angle + tilt,
                           self.rx_lens_center, self.rx_lens_length, self.rx_lens_normal_angle)

    def swapped(self) -> "SceneLayout":
        """Tx and Rx lens center exchanged (lens orientation kept)."""
        return SceneLayout(self.rx_lens_center, self.irs_center, self.irs_normal_angle,
                           self.tx_position, self.rx_lens_length, self.rx_lens_normal_angle)


def _local_components(vec, normal_angle):
    return float(np.dot(vec, tangent_vector(normal_angle))), float(np.dot(vec, normal_vector(normal_angle)))


def incidence_angle(layout: SceneLayout) -> float:
    """Signed incidence angle of the Tx -> IRS-center ray."""
    vec = layout.irs_center - layout.tx_position
    dist = math.hypot(*vec)
    if dist == 0:
        raise GeometryError("tx_position coincides with irs_center")
    t, h = _local_components(vec / dist, layout.irs_normal_angle)
    if -h <= 1e-12:
        raise GeometryError("Tx lies on or behind the IRS line")
    return math.atan2(t, -h)


def reflection_angle_to_target(layout: SceneLayout) -> float:
    """Signed angle of the IRS-center -> Rx-lens-center direction."""
    return departure_angle(layout.irs_center, layout.irs_normal_angle, layout.rx_lens_center)


def departure_angle(irs_center, irs_normal_angle: float, target) -> float:
    vec = np.asarray(target, dtype=float) - np.asarray(irs_center, dtype=float)
    dist = math.hypot(*vec)
    if dist == 0:
        raise GeometryError("target coincides with irs_center")
    t, h = _local_components(vec / dist, irs_normal_angle)
    if h <= 1e-12:
        raise GeometryError("target lies on or behind the IRS line")
    return math.atan2(t, h)


def scene_angles(layout: SceneLayout) -> AnglePair:
    return AnglePair(incidence_angle(layout), reflection_angle_to_target(layout))


def path_lengths(layout: SceneLayout) -> tuple[float, float]:
    """Tx-IRS and IRS-Rx distances (d1, d2)."""
    d1 = math.hypot(*(layout.irs_center - layout.tx_position))
    d2 = math.hypot(*(layout.rx_lens_center - layout.irs_center))
    if d1 == 0 or d2 == 0:
        raise GeometryError("coincident scene points")
    return d1, d2


def segment_points(center, normal_angle: float, length: float, n: int) -> np.ndarray:
    """Midpoints of ``n`` equal sub-intervals of a segment, shape (n, 2)."""
    s = (np.arange(n) + 0.5) / n * length - length / 2
    return np.asarray(center, dtype=float)[None, :] + s[:, None] * tangent_vector(normal_angle)[None, :]
