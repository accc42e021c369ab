"""Random FSO channel states: attenuation, log-normal turbulence, pointing jitter.

Random streams come from :class:`numpy.random.SeedSequence`; worker ``i`` of
``n`` uses child ``i`` of ``SeedSequence(seed).spawn(n)``, so a draw sequence
is fixed by ``(seed, worker count)``.  Changing the worker count changes
which numbers each trial sees.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

RYTOV_PLANE_WAVE = 1.23


@dataclass(frozen=True)
class FadingModel:
    """Channel impairment parameters.

    Attributes
    ----------
    kappa : float
        Weather attenuation coefficient (1/m).
    cn2 : float
        Refractive-index structure parameter (m^-2/3).
    pointing_sigma : float
        Std. dev. of the beam-center jitter along the IRS (m); 0 is perfect
        tracking.
    responsivity : float
        Photodetector responsivity (A/W).
    """

    kappa: float = 0.43e-3
    cn2: float = 1.4e-14
    pointing_sigma: float = 0.0
    responsivity: float = 0.5

    def __post_init__(self):
        if not self.kappa >= 0:
            raise ValueError("kappa must be >= 0")
        if not self.cn2 >= 0:
            raise ValueError("cn2 must be >= 0")
        if not self.pointing_sigma >= 0:
            raise ValueError("pointing_sigma must be >= 0")
        if not 0 < self.responsivity <= 1:
            raise ValueError("responsivity must be in (0, 1]")


@dataclass(frozen=True)
class ChannelDraw:
    h_g: float
    h_a: float
    h_l: float
    h: float


def attenuation_gain(kappa: float, distance: float) -> float:
    """Beer-Lambert power gain ``exp(-kappa * distance)``."""
    if distance < 0:
        raise ValueError("distance must be >= 0")
    return math.exp(-kappa * distance)


def rytov_variance(cn2: float, wavelength: float, distance: float) -> float:
    """Plane-wave Rytov variance ``1.23 Cn2 k^(7/6) z^(11/6)``."""
    if not (cn2 > 0 and wavelength > 0 and distance > 0):
        raise ValueError("cn2, wavelength and distance must be > 0")
    k = 2 * math.pi / wavelength
    return RYTOV_PLANE_WAVE * cn2 * k ** (7 / 6) * distance ** (11 / 6)


def turbulence_variance(cn2: float, wavelength: float, distance: float) -> float:
    """Like :func:`rytov_variance` but returns 0 when there is no turbulence."""
    if cn2 == 0 or distance == 0:
        return 0.0
    return rytov_variance(cn2, wavelength, distance)


def sample_turbulence(sigma_r2: float, rng: np.random.Generator, size=None):
    """Unit-mean log-normal irradiance gain.

    ``h_a = exp(2X)`` with ``X ~ N(-sigma_x2, sigma_x2)`` and
    ``sigma_x2 = sigma_r2 / 4``, so ``E[h_a] = 1`` and
    ``Var[ln h_a] = sigma_r2``.
    """
    if sigma_r2 < 0:
        raise ValueError("sigma_r2 must be >= 0")
    if sigma_r2 == 0:
        return 1.0 if size is None else np.ones(size)
    sigma_x2 = sigma_r2 / 4
    x = rng.normal(-sigma_x2, math.sqrt(sigma_x2), size)
    return np.exp(2 * x)


def sample_pointing_offset(pointing_sigma: float, rng: np.random.Generator, size=None):
    """Zero-mean Gaussian beam-center displacement along the IRS (m)."""
    if pointing_sigma < 0:
        raise ValueError("pointing_sigma must be >= 0")
    if pointing_sigma == 0:
        return 0.0 if size is None else np.zeros(size)
    return rng.normal(0.0, pointing_sigma, size)


def compose_channel(h_g: float, h_a: float, h_l: float, responsivity: float = 1.0) -> ChannelDraw:
    """Composite coefficient ``h = rho * h_l * h_a * h_g``."""
    if not 0 <= h_g <= 1:
        raise ValueError(f"h_g={h_g!r} outside [0, 1]")
    if not h_a > 0:
        raise ValueError(f"h_a={h_a!r} must be > 0")
    if not 0 < h_l <= 1:
        raise ValueError(f"h_l={h_l!r} outside (0, 1]")
    if not 0 < responsivity <= 1:
        raise ValueError(f"responsivity={responsivity!r} outside (0, 1]")
    return ChannelDraw(h_g, h_a, h_l, responsivity * h_l * h_a * h_g)


def worker_streams(seed: int, workers: int) -> list[np.random.Generator]:
    """Independent generators, one per worker, derived from ``seed``."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(workers)]
