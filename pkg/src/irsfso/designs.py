"""IRS phase-shift designs, mirror tilts and delay dispersion."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import AnglePair, GeometryError, Point2D
from .wave import BeamSource, UnitCellGrid, illuminate

SPEED_OF_LIGHT = 299_792_458.0
TWO_PI = 2 * math.pi


@dataclass
class PhaseProfile:
    """Per-cell phase shifts in ``[0, 2*pi)``.

    ``gradient`` is the continuous phase slope (rad/m) of the design along
    the surface at each cell.  Segment cells use it to tilt their own
    radiation; it is zero for piecewise-constant (quantized) profiles.
    ``focus`` and ``steer_angle`` record the design target for the
    geometric-optics engine.
    """

    phases: np.ndarray
    design_tag: str
    levels: int | None = None
    gradient: np.ndarray | None = None
    focus: Point2D | None = None
    steer_angle: float | None = None

    def __post_init__(self):
        self.phases = np.asarray(self.phases, dtype=float)
        if np.any(self.phases < 0) or np.any(self.phases >= TWO_PI) or not np.all(np.isfinite(self.phases)):
            raise ValueError("phases must lie in [0, 2*pi)")
        if self.gradient is not None:
            self.gradient = np.broadcast_to(np.asarray(self.gradient, float), self.phases.shape).copy()

    def __len__(self):
        return len(self.phases)


@dataclass(frozen=True)
class MirrorConfig:
    """Rigid rotation of the whole surface about its center (rad)."""

    tilt_angle: float

    def __post_init__(self):
        if not abs(self.tilt_angle) < math.pi / 2:
            raise ValueError("|tilt_angle| must be < pi/2")


@dataclass(frozen=True)
class QuantizationSpec:
    levels: int

    def __post_init__(self):
        if int(self.levels) != self.levels or self.levels < 2:
            raise ValueError("levels must be an integer >= 2")


def wrap_phase(phi):
    out = np.mod(phi, TWO_PI)
    # mod can round up to exactly 2*pi for tiny negative inputs
    return np.where(out >= TWO_PI, 0.0, out)


def uniform_profile(grid: UnitCellGrid) -> PhaseProfile:
    return PhaseProfile(np.zeros(grid.cell_count), "uniform", gradient=np.zeros(grid.cell_count))


def linear_profile(grid: UnitCellGrid, angles: AnglePair, wavelength: float) -> PhaseProfile:
    """Anomalous-reflection profile steering a ``theta_i`` plane wave to ``theta_r``."""
    k = TWO_PI / wavelength
    slope = k * (math.sin(angles.theta_i) - math.sin(angles.theta_r))
    return PhaseProfile(wrap_phase(slope * grid.offsets), "linear",
                        gradient=np.full(grid.cell_count, slope), steer_angle=angles.theta_r)


def focusing_profile(grid: UnitCellGrid, beam: BeamSource, focus) -> PhaseProfile:
    """Phase-conjugation profile co-phasing every cell at ``focus``.

    The center cell (index ``N // 2``) is assigned phase 0.
    """
    focus = np.asarray(focus, dtype=float)
    pos = grid.cell_positions
    rel = focus[None, :] - pos
    rho = np.hypot(rel[:, 0], rel[:, 1])
    h = rel @ grid.normal
    if np.any(rho == 0) or np.all(np.abs(h) <= 1e-12 * np.max(rho)):
        raise GeometryError("focus lies on the IRS surface")
    ill = illuminate(beam, grid)
    if not np.any(np.abs(ill.field)):
        raise GeometryError("IRS is not illuminated by the beam")
    k = beam.k
    raw = -np.angle(ill.field) + k * rho
    raw = raw - raw[grid.cell_count // 2]
    # d rho / d s = -t . (focus - r) / rho
    grad = -ill.gradient - k * (rel @ grid.tangent) / rho
    return PhaseProfile(wrap_phase(raw), "focusing", gradient=grad, focus=Point2D(*focus))


def mirror_tilt_for(angles: AnglePair) -> MirrorConfig:
    """Tilt that makes the surface normal bisect the incident and target rays."""
    tilt = (angles.theta_i - angles.theta_r) / 2
    if abs(tilt) >= math.pi / 2:
        raise ValueError("required tilt is not realizable")
    return MirrorConfig(tilt)


def quantize_profile(profile: PhaseProfile, spec: QuantizationSpec) -> PhaseProfile:
    """Snap phases to ``spec.levels`` uniform values; ties go to the lower level."""
    step = TWO_PI / spec.levels
    idx = np.ceil(profile.phases / step - 0.5).astype(int) % spec.levels
    return PhaseProfile(idx * step, f"quantized({spec.levels})", levels=spec.levels,
                        gradient=np.zeros(len(profile)), focus=profile.focus,
                        steer_angle=profile.steer_angle)


def delay_dispersion(length_L: float, angles: AnglePair) -> float:
    """Maximum path-delay spread (s) across an anomalously reflecting aperture."""
    if not length_L > 0:
        raise ValueError("length_L must be > 0")
    return length_L / SPEED_OF_LIGHT * abs(math.sin(angles.theta_i) - math.sin(angles.theta_r))


def symbols_affected(d_max: float, rate_bps: float) -> int:
    """Number of symbol periods spanned by a delay spread."""
    periods = d_max * rate_bps
    return int(math.ceil(periods - 1e-9)) if periods > 0 else 0
