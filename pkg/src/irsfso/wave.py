"""Scalar wave-optics engine.

Each unit cell is a diffusive scatterer that re-radiates the incident field
with its programmed phase shift.  The reflected field at an observation point
``r`` is the 2D Huygens sum::

    E(r) = (d / sqrt(lam)) * sum_n a_n exp(j Phi_n) sqrt(cos th_n) exp(-j k rho_n) / sqrt(rho_n) * F_n

where ``a_n = E_inc(r_n) sqrt(cos th_inc)`` carries the power intercepted by
cell ``n`` (projected aperture), ``th_n`` is the departure angle toward ``r``,
``rho_n = |r - r_n|`` and ``F_n`` is the cell element factor (1 for point
cells, a sinc for finite-width segment cells).  With the ``sqrt(cos)``
obliquity the far-field power of an array with half-wavelength (or any
multiple of it) spacing equals the intercepted power exactly, for every phase
profile.

Fields are 2D: ``|E|**2`` is a power density in W per transverse meter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numba
import numpy as np

from .geometry import (GeometryError, Point2D, SceneLayout, normal_vector,
                       segment_points, tangent_vector, unit_from_angle)

# cells whose intercepted power is below this fraction of the strongest one
# are dropped from the Huygens sum
ACTIVE_CELL_FLOOR = 1e-16


class NumericalError(RuntimeError):
    """Raised when the field engine produces non-finite values."""


@dataclass(frozen=True)
class BeamSource:
    """Gaussian-beam or plane-wave source.

    ``axis_angle`` is the direction of propagation measured from +x,
    counter-clockwise.  For a plane wave ``total_power`` is the transverse
    power density in W/m, and the wave is cut to the IRS extent.
    """

    kind: str
    wavelength: float
    waist_radius: float | None
    total_power: float
    axis_origin: Point2D
    axis_angle: float

    def __post_init__(self):
        if self.kind not in ("gaussian", "plane"):
            raise ValueError(f"unknown beam kind {self.kind!r}")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be > 0")
        if self.kind == "gaussian" and not (self.waist_radius and self.waist_radius > 0):
            raise ValueError("waist_radius must be > 0 for a gaussian beam")
        if not self.total_power > 0:
            raise ValueError("total_power must be > 0")
        object.__setattr__(self, "axis_origin", Point2D(*map(float, self.axis_origin)))

    @classmethod
    def aimed(cls, kind, wavelength, waist_radius, total_power, origin, target):
        """Source at ``origin`` whose axis points exactly at ``target``."""
        vec = np.asarray(target, dtype=float) - np.asarray(origin, dtype=float)
        if not np.any(vec):
            raise GeometryError("beam origin coincides with its target")
        return cls(kind, wavelength, waist_radius, total_power, Point2D(*origin),
                   math.atan2(vec[1], vec[0]))

    @property
    def k(self) -> float:
        return 2 * math.pi / self.wavelength

    @property
    def rayleigh_range(self) -> float:
        return math.pi * self.waist_radius ** 2 / self.wavelength

    @property
    def direction(self) -> np.ndarray:
        return unit_from_angle(self.axis_angle)

    @property
    def transverse(self) -> np.ndarray:
        return unit_from_angle(self.axis_angle + math.pi / 2)

    def to_local(self, points):
        """Beam-local (z, x) coordinates of points, z along the axis."""
        rel = np.atleast_2d(np.asarray(points, dtype=float)) - self.axis_origin.as_array()
        return rel @ self.direction, rel @ self.transverse

    def beam_radius(self, z):
        return self.waist_radius * np.sqrt(1 + (np.asarray(z) / self.rayleigh_range) ** 2)

    def with_(self, **changes) -> "BeamSource":
        return replace(self, **changes)


@dataclass(frozen=True)
class UnitCellGrid:
    """Uniform line of ``cell_count`` cells centered on ``center``.

    ``cell_model`` selects how a cell radiates: ``"point"`` treats it as a
    point scatterer; ``"segment"`` as a radiating strip of width
    ``cell_spacing`` whose phase varies linearly across it, which keeps coarse
    grids (many wavelengths per cell) free of grating lobes.
    """

    cell_count: int
    cell_spacing: float
    center: Point2D = Point2D(0.0, 0.0)
    normal_angle: float = 0.0
    cell_model: str = "point"

    def __post_init__(self):
        if int(self.cell_count) != self.cell_count or self.cell_count < 1:
            raise ValueError("cell_count must be a positive integer")
        if not self.cell_spacing > 0:
            raise ValueError("cell_spacing must be > 0")
        if self.cell_model not in ("point", "segment"):
            raise ValueError(f"unknown cell_model {self.cell_model!r}")
        object.__setattr__(self, "cell_count", int(self.cell_count))
        object.__setattr__(self, "center", Point2D(*map(float, self.center)))

    @classmethod
    def spanning(cls, length, cell_spacing, center=(0.0, 0.0), normal_angle=0.0, cell_model="point"):
        """Grid with ``round(length / cell_spacing)`` cells (at least one)."""
        n = max(1, int(round(length / cell_spacing)))
        return cls(n, cell_spacing, Point2D(*center), normal_angle, cell_model)

    @property
    def length(self) -> float:
        return self.cell_count * self.cell_spacing

    @property
    def offsets(self) -> np.ndarray:
        """Cell coordinates along the surface, relative to the center."""
        return (np.arange(self.cell_count) - (self.cell_count - 1) / 2) * self.cell_spacing

    @property
    def normal(self) -> np.ndarray:
        return normal_vector(self.normal_angle)

    @property
    def tangent(self) -> np.ndarray:
        return tangent_vector(self.normal_angle)

    @property
    def cell_positions(self) -> np.ndarray:
        return self.center.as_array()[None, :] + self.offsets[:, None] * self.tangent[None, :]

    def rotated(self, tilt: float) -> "UnitCellGrid":
        return replace(self, normal_angle=self.normal_angle + tilt)


@dataclass
class FieldProfile:
    sample_points: np.ndarray
    amplitudes: np.ndarray
    power_density: np.ndarray = field(init=False)

    def __post_init__(self):
        self.sample_points = np.asarray(self.sample_points, dtype=float)
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if len(self.sample_points) != len(self.amplitudes):
            raise ValueError("sample_points and amplitudes differ in length")
        self.power_density = np.abs(self.amplitudes) ** 2


@dataclass
class Illumination:
    """Incident field sampled on the cells.

    ``gradient`` is the phase slope (rad/m) of the incident field along the
    surface tangent, used by segment cells.
    """

    field: np.ndarray
    cos_in: np.ndarray
    gradient: np.ndarray

    @property
    def excitation(self) -> np.ndarray:
        return self.field * np.sqrt(self.cos_in)


def gaussian_field_at(beam: BeamSource, z, x):
    """2D Gaussian-beam field at beam-local coordinates.

    ``z`` is measured along the axis from the waist and ``x`` transverse to
    it.  The field is normalized so that the transverse integral of
    ``|E|**2`` equals ``beam.total_power`` at every ``z``.
    """
    if beam.kind != "gaussian":
        raise ValueError("gaussian_field_at needs a gaussian beam")
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    zr = beam.rayleigh_range
    k = beam.k
    w = beam.beam_radius(z)
    inv_r = z / (z ** 2 + zr ** 2)
    gouy = np.arctan(z / zr)
    amp = np.sqrt(beam.total_power * math.sqrt(2 / math.pi) / w) * np.exp(-(x / w) ** 2)
    phase = -(k * z + k * x ** 2 * inv_r / 2 - gouy / 2)
    return amp * np.exp(1j * phase)


def _gaussian_phase_gradient(beam, z, x):
    zr = beam.rayleigh_range
    k = beam.k
    den = z ** 2 + zr ** 2
    dz = -k - (k * x ** 2 / 2) * (zr ** 2 - z ** 2) / den ** 2 + 0.5 * zr / den
    dx = -k * x * z / den
    return dz, dx


def illuminate(beam: BeamSource, grid: UnitCellGrid) -> Illumination:
    pos = grid.cell_positions
    u = beam.direction
    cos_in = float(-np.dot(u, grid.normal))
    n = grid.cell_count
    if cos_in <= 0:
        zeros = np.zeros(n)
        return Illumination(zeros.astype(complex), zeros, zeros)
    t_u = float(np.dot(grid.tangent, u))
    if beam.kind == "plane":
        rel = pos - beam.axis_origin.as_array()
        fld = math.sqrt(beam.total_power) * np.exp(-1j * beam.k * (rel @ u))
        grad = np.full(n, -beam.k * t_u)
    else:
        z, x = beam.to_local(pos)
        fld = gaussian_field_at(beam, z, x)
        dz, dx = _gaussian_phase_gradient(beam, z, x)
        grad = dz * t_u + dx * float(np.dot(grid.tangent, beam.transverse))
    return Illumination(fld, np.full(n, cos_in), grad)


def incident_field_on_irs(beam: BeamSource, grid: UnitCellGrid) -> np.ndarray:
    """Complex incident field at every cell position."""
    return illuminate(beam, grid).field


def incident_power(beam: BeamSource, grid: UnitCellGrid) -> float:
    """Power intercepted by the IRS (W), summed over cell apertures."""
    ill = illuminate(beam, grid)
    return float(np.sum(np.abs(ill.field) ** 2 * ill.cos_in) * grid.cell_spacing)


@numba.njit(parallel=True, cache=True, fastmath=True)
def _huygens_kernel(wx, hy, s, amp_re, amp_im, grad, k, half_d, segment):
    m_obs = wx.shape[0]
    n_cells = s.shape[0]
    out_re = np.zeros(m_obs)
    out_im = np.zeros(m_obs)
    for m in numba.prange(m_obs):
        w = wx[m]
        h = hy[m]
        if h <= 0.0:
            continue
        rho_ref = math.sqrt(w * w + h * h)
        sqrt_h = math.sqrt(h)
        acc_re = 0.0
        acc_im = 0.0
        for n in range(n_cells):
            dw = w - s[n]
            rho = math.sqrt(dw * dw + h * h)
            # path difference to the grid center, free of cancellation
            delta = s[n] * (s[n] - 2.0 * w) / (rho + rho_ref)
            mag = sqrt_h / rho
            if segment:
                arg = (grad[n] + k * dw / rho) * half_d
                if arg != 0.0:
                    mag *= math.sin(arg) / arg
            ph = -k * delta
            c = math.cos(ph) * mag
            sn = math.sin(ph) * mag
            acc_re += amp_re[n] * c - amp_im[n] * sn
            acc_im += amp_re[n] * sn + amp_im[n] * c
        g = -k * rho_ref
        cg = math.cos(g)
        sg = math.sin(g)
        out_re[m] = acc_re * cg - acc_im * sg
        out_im[m] = acc_re * sg + acc_im * cg
    return out_re, out_im


def _phase_arrays(phases, n):
    vals = np.asarray(getattr(phases, "phases", phases), dtype=float)
    if vals.shape != (n,):
        raise ValueError(f"phase profile has {vals.size} entries, grid has {n} cells")
    grad = getattr(phases, "gradient", None)
    grad = np.zeros(n) if grad is None else np.asarray(grad, dtype=float)
    return vals, grad


def scatter_field(grid: UnitCellGrid, incident, phases, observation, *, wavelength: float,
                  cos_in=None, incident_gradient=None):
    """Reflected field at one or more observation points.

    Parameters
    ----------
    grid : UnitCellGrid
    incident : array_like of complex, shape (N,)
        Incident field on each cell.
    phases : PhaseProfile or array_like, shape (N,)
        Cell phase shifts (rad).
    observation : array_like, shape (2,) or (M, 2)
        Observation point(s) in global coordinates.
    wavelength : float
    cos_in : array_like, optional
        Cosine of the local incidence angle per cell (projected-aperture
        weighting); defaults to 1.
    incident_gradient : array_like, optional
        Incident phase slope along the surface (rad/m), segment cells only.

    Returns
    -------
    complex or ndarray of complex
        Points behind the surface receive zero field.
    """
    n = grid.cell_count
    incident = np.asarray(incident, dtype=complex)
    if incident.shape != (n,):
        raise ValueError(f"incident has {incident.size} entries, grid has {n} cells")
    phi, design_grad = _phase_arrays(phases, n)
    cos_in = np.ones(n) if cos_in is None else np.broadcast_to(np.asarray(cos_in, float), (n,))
    inc_grad = np.zeros(n) if incident_gradient is None else np.asarray(incident_gradient, float)

    obs = np.asarray(observation, dtype=float)
    single = obs.ndim == 1
    obs = np.atleast_2d(obs)
    rel = obs - grid.center.as_array()
    w = rel @ grid.tangent
    h = rel @ grid.normal
    on_surface = (np.abs(h) <= 1e-12 * np.maximum(1.0, np.abs(w))) & (np.abs(w) <= grid.length / 2)
    if np.any(on_surface):
        raise GeometryError("observation point lies on the IRS surface")

    k = 2 * math.pi / wavelength
    amp = (grid.cell_spacing / math.sqrt(wavelength)) * incident * np.sqrt(cos_in) * np.exp(1j * phi)
    if not np.all(np.isfinite(amp)):
        raise NumericalError("non-finite cell excitation")
    keep = _active(amp)
    s = grid.offsets[keep]
    out_re, out_im = _huygens_kernel(
        np.ascontiguousarray(w), np.ascontiguousarray(h), np.ascontiguousarray(s),
        np.ascontiguousarray(amp.real[keep]), np.ascontiguousarray(amp.imag[keep]),
        np.ascontiguousarray((design_grad + inc_grad)[keep]),
        k, grid.cell_spacing / 2, grid.cell_model == "segment")
    out = out_re + 1j * out_im
    if not np.all(np.isfinite(out)):
        raise NumericalError("non-finite scattered field")
    return complex(out[0]) if single else out


def _active(amp):
    p = np.abs(amp) ** 2
    top = p.max() if p.size else 0.0
    if top == 0:
        return np.zeros(p.shape, dtype=bool)
    return p > ACTIVE_CELL_FLOOR * top


def resolve_design(grid: UnitCellGrid, design):
    """(grid, phases) for a PhaseProfile, a raw phase array or a MirrorConfig.

    A mirror is the grid rotated by its tilt with all phases zero.
    """
    if hasattr(design, "tilt_angle"):
        return grid.rotated(design.tilt_angle), np.zeros(grid.cell_count)
    return grid, design


def reflected_field(beam: BeamSource, grid: UnitCellGrid, design, points):
    """Field scattered by the IRS under ``beam`` illumination at ``points``."""
    grid, phases = resolve_design(grid, design)
    ill = illuminate(beam, grid)
    return scatter_field(grid, ill.field, phases, points, wavelength=beam.wavelength,
                         cos_in=ill.cos_in, incident_gradient=ill.gradient)


def power_density_profile(scene: SceneLayout, beam: BeamSource, grid: UnitCellGrid, phases,
                          line_y: float, x_range, n_samples: int) -> FieldProfile:
    """Sample ``|E|**2`` of the reflected wave along the line ``y = line_y``."""
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    xs = np.linspace(x_range[0], x_range[1], int(n_samples))
    pts = np.column_stack([xs, np.full_like(xs, line_y)])
    return FieldProfile(pts, reflected_field(beam, grid, phases, pts))


def lens_sample_count(scene: SceneLayout, beam: BeamSource, grid: UnitCellGrid, design=None,
                      per_period: int = 8, minimum: int = 64) -> int:
    """Midpoint samples needed across the Rx lens.

    The received intensity oscillates at most at ``k * du`` rad/m, where
    ``du`` is the spread of arrival-direction sines (lens tangent component)
    between the outermost illuminated cells and the lens endpoints.
    """
    if design is not None:
        grid, _ = resolve_design(grid, design)
    ill = illuminate(beam, grid)
    keep = _active(ill.excitation)
    if not np.any(keep):
        return minimum
    idx = np.flatnonzero(keep)
    cells = grid.cell_positions[[idx[0], idx[-1]]]
    t_lens = tangent_vector(scene.rx_lens_normal_angle)
    half = scene.rx_lens_length / 2
    ends = np.array(scene.rx_lens_center)[None, :] + np.array([[-half], [half]]) * t_lens[None, :]
    u = []
    for c in cells:
        for e in ends:
            v = e - c
            u.append(np.dot(v, t_lens) / np.hypot(*v))
    bandwidth = beam.k * (max(u) - min(u))
    return max(minimum, int(math.ceil(per_period * scene.rx_lens_length * bandwidth / (2 * math.pi))))


def lens_captured_power(scene: SceneLayout, beam: BeamSource, grid: UnitCellGrid, phases,
                        n_samples: int | None = None) -> float:
    """Power (W) collected by the Rx lens segment.

    Composite midpoint rule over the lens; the flux through each sample is
    ``|E|**2`` projected onto the lens normal using the arrival direction
    from the IRS center.  ``phases`` may be a PhaseProfile, a phase array or
    a MirrorConfig.
    """
    if n_samples is None:
        n_samples = lens_sample_count(scene, beam, grid, phases)
    pts = segment_points(scene.rx_lens_center, scene.rx_lens_normal_angle, scene.rx_lens_length,
                         int(n_samples))
    fld = reflected_field(beam, grid, phases, pts)
    arrival = pts - grid.center.as_array()
    arrival /= np.hypot(arrival[:, 0], arrival[:, 1])[:, None]
    proj = np.clip(-(arrival @ normal_vector(scene.rx_lens_normal_angle)), 0.0, None)
    return float(np.sum(np.abs(fld) ** 2 * proj) * scene.rx_lens_length / n_samples)
