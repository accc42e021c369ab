"""SNR, outage and power-scaling analysis for IRS and relay links."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .channel import (FadingModel, attenuation_gain, sample_pointing_offset, sample_turbulence,
                      turbulence_variance, worker_streams)
from .designs import (MirrorConfig, focusing_profile, linear_profile, mirror_tilt_for,
                      quantize_profile, QuantizationSpec, uniform_profile)
from .geometric import gaussian_lens_capture, go_captured_power
from .geometry import Point2D, SceneLayout, path_lengths, scene_angles
from .wave import BeamSource, UnitCellGrid, lens_captured_power

MIN_TRIALS = 1000
DESIGN_FAMILIES = ("mirror", "linear", "focusing", "uniform")


@dataclass(frozen=True)
class SnrConfig:
    transmit_snr_db: float
    snr_threshold_db: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.transmit_snr_db) and math.isfinite(self.snr_threshold_db)):
            raise ValueError("SNR values must be finite")

    @property
    def transmit_snr(self) -> float:
        return 10 ** (self.transmit_snr_db / 10)

    @property
    def threshold(self) -> float:
        return 10 ** (self.snr_threshold_db / 10)


@dataclass(frozen=True)
class OutageEstimate:
    p_out: float
    trials: int
    ci95_halfwidth: float


@dataclass(frozen=True)
class RelayLinkSpec:
    """Two-hop decode-and-forward relay.

    ``power_split`` is the Tx share of the total transmit power; the relay
    gets the rest.  ``relay_beam`` supplies the laser parameters used on both
    hops (its origin and axis are re-aimed per hop).
    """

    relay_position: Point2D
    power_split: float
    relay_lens_length: float
    relay_beam: BeamSource

    def __post_init__(self):
        if not 0 < self.power_split < 1:
            raise ValueError("power_split must be in (0, 1)")
        if not self.relay_lens_length > 0:
            raise ValueError("relay_lens_length must be > 0")
        object.__setattr__(self, "relay_position", Point2D(*map(float, self.relay_position)))


def instantaneous_snr(config: SnrConfig, h):
    """Electrical SNR ``gamma_bar * h**2`` (linear)."""
    h = np.asarray(h, dtype=float)
    if np.any(h < 0):
        raise ValueError("h must be >= 0")
    out = config.transmit_snr * h ** 2
    return float(out) if out.ndim == 0 else out


def ci95_halfwidth(outages: int, trials: int) -> float:
    """Normal-approximation 95% half-width.

    Uses ``p = (x + 0.5) / (n + 1)`` so the width stays positive when no
    (or every) trial is an outage.
    """
    p = (outages + 0.5) / (trials + 1)
    return 1.96 * math.sqrt(p * (1 - p) / trials)


def _split(n, workers):
    base, extra = divmod(n, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def estimate_outage(count_outages: Callable[[np.random.Generator, int], int], trials: int,
                    seed: int, workers: int = 1, early_exit: bool = True) -> OutageEstimate:
    """Monte-Carlo outage probability.

    ``count_outages(rng, n)`` draws ``n`` channel states and returns how many
    are in outage.  Trials run in rounds; each round is partitioned across
    ``workers`` generators.  With ``early_exit`` the run stops after a round
    once the 95% half-width drops below 5% of the estimate.
    """
    if trials < MIN_TRIALS:
        raise ValueError(f"trials must be >= {MIN_TRIALS}")
    streams = worker_streams(seed, workers)
    rounds = [MIN_TRIALS]
    step = max(MIN_TRIALS, trials // 20)
    while sum(rounds) < trials:
        rounds.append(min(step, trials - sum(rounds)))
    done = 0
    outages = 0
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for size in rounds:
            parts = _split(size, workers)
            if pool is None:
                counts = [count_outages(streams[0], parts[0])]
            else:
                counts = list(pool.map(count_outages, streams, parts))
            outages += int(sum(counts))
            done += size
            p = outages / done
            hw = ci95_halfwidth(outages, done)
            if early_exit and hw < 0.05 * p:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    return OutageEstimate(outages / done, done, ci95_halfwidth(outages, done))


def _hg_lookup(scene, beam, grid, design, sigma, n_points=33):
    offsets = np.linspace(-5 * sigma, 5 * sigma, n_points)
    t_hat = grid.tangent
    gains = []
    for off in offsets:
        target = grid.center.as_array() + off * t_hat
        shifted = BeamSource.aimed(beam.kind, beam.wavelength, beam.waist_radius,
                                   beam.total_power, beam.axis_origin, target)
        gains.append(min(1.0, lens_captured_power(scene, shifted, grid, design) / beam.total_power))
    return offsets, np.asarray(gains)


def irs_geometric_gain(scene: SceneLayout, beam: BeamSource, grid: UnitCellGrid, design) -> float:
    """Deterministic h_g: fraction of transmit power collected by the Rx lens."""
    return min(1.0, lens_captured_power(scene, beam, grid, design) / beam.total_power)


def irs_outage_mc(scene: SceneLayout, beam: BeamSource, grid: UnitCellGrid, design,
                  fading: FadingModel, snr: SnrConfig, trials: int, seed: int, workers: int = 1,
                  turbulence: str = "end-to-end", early_exit: bool = True,
                  h_g: float | None = None) -> OutageEstimate:
    """Outage probability of the IRS-assisted link.

    ``h_g`` may be passed in to reuse a deterministic geometric gain across
    an SNR sweep; otherwise it comes from the wave engine.  With pointing
    jitter the gain is interpolated from a table over beam offsets.
    ``turbulence`` is ``"end-to-end"`` (one draw over d1 + d2) or
    ``"per-hop"`` (independent draws over d1 and d2).
    """
    d1, d2 = path_lengths(scene)
    h_l = attenuation_gain(fading.kappa, d1 + d2)
    if turbulence == "end-to-end":
        variances = [turbulence_variance(fading.cn2, beam.wavelength, d1 + d2)]
    elif turbulence == "per-hop":
        variances = [turbulence_variance(fading.cn2, beam.wavelength, d) for d in (d1, d2)]
    else:
        raise ValueError(f"unknown turbulence mode {turbulence!r}")

    table = None
    if fading.pointing_sigma > 0:
        table = _hg_lookup(scene, beam, grid, design, fading.pointing_sigma)
    elif h_g is None:
        h_g = irs_geometric_gain(scene, beam, grid, design)
    scale = fading.responsivity * h_l
    gbar, thr = snr.transmit_snr, snr.threshold

    def count(rng, n):
        h_a = np.ones(n)
        for var in variances:
            h_a = h_a * sample_turbulence(var, rng, n)
        if table is None:
            gain = h_g
        else:
            gain = np.interp(sample_pointing_offset(fading.pointing_sigma, rng, n), *table)
        h = scale * h_a * gain
        return int(np.count_nonzero(gbar * h ** 2 < thr))

    return estimate_outage(count, trials, seed, workers, early_exit)


def df_outage(gamma1, gamma2, threshold: float):
    """Decode-and-forward outage indicator: the weaker hop is below threshold."""
    return np.minimum(gamma1, gamma2) < threshold


def _lens_normal_facing(lens_center, source) -> float:
    v = np.asarray(source, dtype=float) - np.asarray(lens_center, dtype=float)
    v = v / np.hypot(*v)
    return math.atan2(-v[0], v[1])


def relay_hop_gains(scene: SceneLayout, relay: RelayLinkSpec, fading: FadingModel):
    """Per-hop (distance, h_l, h_g) for Tx -> relay and relay -> Rx."""
    b = relay.relay_beam
    tx_beam = BeamSource.aimed(b.kind, b.wavelength, b.waist_radius, b.total_power,
                               scene.tx_position, relay.relay_position)
    relay_normal = _lens_normal_facing(relay.relay_position, scene.tx_position)
    g1 = gaussian_lens_capture(tx_beam, relay.relay_position, relay.relay_lens_length, relay_normal)
    hop2_beam = BeamSource.aimed(b.kind, b.wavelength, b.waist_radius, b.total_power,
                                 relay.relay_position, scene.rx_lens_center)
    g2 = gaussian_lens_capture(hop2_beam, scene.rx_lens_center, scene.rx_lens_length,
                               scene.rx_lens_normal_angle)
    d1 = math.hypot(*(relay.relay_position - scene.tx_position))
    d2 = math.hypot(*(scene.rx_lens_center - relay.relay_position))
    return [(d1, attenuation_gain(fading.kappa, d1), g1),
            (d2, attenuation_gain(fading.kappa, d2), g2)]


def relay_outage_mc(scene: SceneLayout, relay: RelayLinkSpec, fading: FadingModel, snr: SnrConfig,
                    trials: int, seed: int, workers: int = 1,
                    early_exit: bool = True) -> OutageEstimate:
    """Outage of a full-duplex decode-and-forward two-hop relay link.

    Hop ``i`` has SNR ``split_i * gamma_bar * h_i**2`` with independent
    turbulence over its own distance; the link is in outage when either hop
    is below threshold.
    """
    hops = relay_hop_gains(scene, relay, fading)
    wl = relay.relay_beam.wavelength
    splits = (relay.power_split, 1 - relay.power_split)
    params = [(split * snr.transmit_snr, fading.responsivity * h_l * h_g,
               turbulence_variance(fading.cn2, wl, d))
              for split, (d, h_l, h_g) in zip(splits, hops)]
    thr = snr.threshold

    def count(rng, n):
        gammas = [g * (scale * sample_turbulence(var, rng, n)) ** 2 for g, scale, var in params]
        return int(np.count_nonzero(df_outage(gammas[0], gammas[1], thr)))

    return estimate_outage(count, trials, seed, workers, early_exit)


def build_design(family: str, scene: SceneLayout, beam: BeamSource, grid: UnitCellGrid,
                 quantization: int | None = None):
    """Design of the given family aimed at the Rx lens center."""
    angles = scene_angles(scene)
    if family == "mirror":
        return mirror_tilt_for(angles)
    if family == "linear":
        prof = linear_profile(grid, angles, beam.wavelength)
    elif family == "focusing":
        prof = focusing_profile(grid, beam, scene.rx_lens_center)
    elif family == "uniform":
        prof = uniform_profile(grid)
    else:
        raise ValueError(f"unknown design family {family!r}")
    if quantization:
        prof = quantize_profile(prof, QuantizationSpec(quantization))
    return prof


@dataclass(frozen=True)
class SweepPoint:
    length: float
    cell_count: int
    fraction: float


def power_scaling_sweep(scene: SceneLayout, beam: BeamSource, design_family: str,
                        lengths: Sequence[float], engine: str = "wave",
                        cell_spacing: float | None = None, cell_model: str = "point",
                        quantization: int | None = None) -> list[SweepPoint]:
    """Fraction of transmit power reaching the Rx lens versus IRS length.

    The cell spacing is fixed (default half a wavelength), so the cell count
    grows linearly with L; each reported length is ``N * spacing``.
    """
    lengths = np.asarray(lengths, dtype=float)
    if np.any(lengths <= 0) or np.any(np.diff(lengths) < 0):
        raise ValueError("lengths must be positive and ascending")
    if engine not in ("wave", "geometric"):
        raise ValueError(f"unknown engine {engine!r}")
    spacing = beam.wavelength / 2 if cell_spacing is None else cell_spacing
    out = []
    for length in lengths:
        grid = UnitCellGrid.spanning(length, spacing, scene.irs_center, scene.irs_normal_angle,
                                     cell_model)
        design = build_design(design_family, scene, beam, grid, quantization)
        if engine == "wave":
            power = lens_captured_power(scene, beam, grid, design)
        else:
            power = go_captured_power(scene, beam, grid, design)
        out.append(SweepPoint(grid.length, grid.cell_count, power / beam.total_power))
    return out


def fit_loglog_slope(x, y, lo: float, hi: float) -> float:
    """Least-squares slope of log10(y) vs log10(x) for ``lo <= x <= hi``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sel = (x >= lo) & (x <= hi) & (y > 0)
    if np.count_nonzero(sel) < 2:
        raise ValueError("need at least two positive points in the fit window")
    return float(np.polyfit(np.log10(x[sel]), np.log10(y[sel]), 1)[0])


def _crossing_db(p_target, snr_db, p_out):
    snr_db = np.asarray(snr_db, dtype=float)
    logp = np.log10(np.maximum(np.asarray(p_out, dtype=float), 1e-300))
    lt = math.log10(p_target)
    for i in range(len(snr_db) - 1):
        if logp[i] >= lt > logp[i + 1]:
            frac = (logp[i] - lt) / (logp[i] - logp[i + 1])
            return snr_db[i] + frac * (snr_db[i + 1] - snr_db[i])
    raise ValueError(f"outage curve does not cross {p_target}")


def snr_gain_at(p_target: float, curve_a, curve_b) -> float:
    """Horizontal gap (dB) between two outage curves at ``p_target``.

    Curves are ``(snr_db, p_out)`` pairs; a positive result means curve ``a``
    reaches the target at a lower transmit SNR than curve ``b``.
    """
    return _crossing_db(p_target, *curve_b) - _crossing_db(p_target, *curve_a)
