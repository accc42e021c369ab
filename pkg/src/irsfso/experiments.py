"""Experiment drivers producing plot-ready result tables.

Each ``run_*`` function takes an :class:`~irsfso.config.ExperimentConfig`
and returns a :class:`ResultTable`.  Tables serialize to CSV with a
``#``-prefixed metadata preamble, a header row and a units row.  Nothing
time-dependent is written, so identical inputs give identical files.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig, config_hash
from .designs import delay_dispersion, linear_profile, symbols_affected
from .geometric import go_power_density
from .geometry import AnglePair, Point2D
from .link import (RelayLinkSpec, SnrConfig, build_design, irs_geometric_gain, irs_outage_mc,
                   power_scaling_sweep, relay_outage_mc)
from .wave import BeamSource, NumericalError, UnitCellGrid, reflected_field

RELAY_PROTOCOL = "full-duplex decode-and-forward, min-SNR threshold per hop"


@dataclass
class ResultTable:
    columns: list
    units: list
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.units) != len(self.columns):
            raise ValueError("units row must match the columns")

    def append(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values, expected {len(self.columns)}")
        self.rows.append(tuple(values))

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def where(self, **match):
        idx = {self.columns.index(k): v for k, v in match.items()}
        return [r for r in self.rows if all(r[i] == v for i, v in idx.items())]

    @staticmethod
    def _fmt(v):
        if isinstance(v, (float, np.floating)):
            return repr(float(v))
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        return str(v)

    def data_text(self) -> str:
        """Header, units row and data rows as CSV text."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        w.writerow(self.units)
        for r in self.rows:
            w.writerow([self._fmt(v) for v in r])
        return buf.getvalue()

    def to_csv(self) -> str:
        head = "".join(f"# {k}: {v}\n" for k, v in self.metadata.items())
        return head + self.data_text()

    def write(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def _metadata(cfg: ExperimentConfig, command: str, **extra) -> dict:
    meta = {
        "tool": f"irsfso {__version__}",
        "command": command,
        "config_hash": config_hash(cfg),
        "seed": cfg.mc.seed,
        "workers": cfg.mc.workers,
        "technology": cfg.irs.technology,
        "control_resolution": cfg.irs.control_resolution,
    }
    meta.update(extra)
    return meta


def _require_sweep(cfg, *variables):
    if cfg.sweep.variable not in variables:
        raise ConfigError("sweep.variable", f"this experiment sweeps {' or '.join(variables)}, "
                                            f"got {cfg.sweep.variable!r}")


def _check_finite(values, what):
    if not np.all(np.isfinite(values)):
        raise NumericalError(f"non-finite {what}")


def run_field_map(cfg: ExperimentConfig) -> ResultTable:
    """Reflected power density along ``y = field_map.line_y_m``.

    A plane wave of the given transverse density hits an IRS centered at the
    origin at ``theta_i``; a linear design steers it to ``theta_r``.  Both
    engines are evaluated for every wavelength in ``field_map.wavelengths_m``.
    """
    _require_sweep(cfg, "x_m")
    v = cfg.values
    xs = cfg.sweep.values()
    line_y = v["field_map.line_y_m"]
    pts = np.column_stack([xs, np.full_like(xs, line_y)])
    ti, tr = math.radians(v["field_map.theta_i_deg"]), math.radians(v["field_map.theta_r_deg"])
    # propagation direction of a wave arriving at theta_i on a +y-facing surface
    u = np.array([math.sin(ti), -math.cos(ti)])
    table = ResultTable(["wavelength_m", "x_m", "power_density_per_m", "engine"],
                        ["m", "m", "W/m", "-"],
                        metadata=_metadata(cfg, "field-map", design="linear", source="plane wave"))
    for wl in v["field_map.wavelengths_m"]:
        grid = UnitCellGrid.spanning(v["field_map.irs_length_m"], v["irs.cell_spacing_wavelengths"] * wl,
                                     cell_model=v["irs.cell_model"])
        beam = BeamSource.aimed("plane", wl, None, v["field_map.power_density_w_per_m"],
                                -line_y * u, (0.0, 0.0))
        design = linear_profile(grid, AnglePair(ti, tr), wl)
        wave_p = np.abs(reflected_field(beam, grid, design, pts)) ** 2
        go_p = go_power_density(beam, grid, design, pts)
        _check_finite(wave_p, "wave power density")
        for engine, vals in (("wave", wave_p), ("geometric", go_p)):
            for x, p in zip(xs, vals):
                table.append(float(wl), float(x), float(p), engine)
    return table


def run_power_sweep(cfg: ExperimentConfig) -> ResultTable:
    """Fraction of transmit power on the Rx lens versus IRS length."""
    _require_sweep(cfg, "irs_length_m")
    v = cfg.values
    lengths = cfg.sweep.values()
    spacing = cfg.irs.grid.cell_spacing
    table = ResultTable(["L_m", "N", "fraction", "engine", "design"], ["m", "cells", "1", "-", "-"],
                        metadata=_metadata(cfg, "power-sweep", cell_spacing_m=repr(spacing),
                                           cell_model=v["irs.cell_model"]))
    for design in v["power_sweep.designs"]:
        levels = cfg.irs.quantization_levels if design != "mirror" else None
        for engine in v["power_sweep.engines"]:
            points = power_scaling_sweep(cfg.scene, cfg.beam, design, lengths, engine, spacing,
                                         v["irs.cell_model"], levels)
            _check_finite([p.fraction for p in points], "captured fraction")
            for p in points:
                table.append(p.length, p.cell_count, p.fraction, engine, design)
    return table


def run_outage(cfg: ExperimentConfig) -> ResultTable:
    """Outage probability versus transmit SNR for IRS and relay links.

    Every SNR point reuses ``mc.seed``, so the curves share random numbers
    across the SNR axis.  The meta-surface uses ``irs.design`` (focusing if
    the technology is a mirror type).
    """
    _require_sweep(cfg, "transmit_snr_db")
    v = cfg.values
    snrs = cfg.sweep.values()
    meta_family = cfg.irs.design if cfg.irs.design != "mirror" else "focusing"
    mc = cfg.mc
    table = ResultTable(["snr_db", "p_out", "ci95", "system", "w0"], ["dB", "1", "1", "-", "m"],
                        metadata=_metadata(cfg, "outage", relay_protocol=RELAY_PROTOCOL,
                                           metasurface_design=meta_family,
                                           turbulence=v["fading.turbulence_mode"]))
    scene, grid = cfg.scene, cfg.irs.grid
    for w0 in v["outage.waists_m"]:
        beam = cfg.beam.with_(waist_radius=w0)
        curves = {}
        for system in v["outage.systems"]:
            if system == "relay":
                relay_beam = BeamSource(beam.kind, beam.wavelength, w0, beam.total_power,
                                        Point2D(v["relay.x_m"], v["relay.y_m"]), 0.0)
                spec = RelayLinkSpec(Point2D(v["relay.x_m"], v["relay.y_m"]), v["relay.power_split"],
                                     v["relay.lens_length_m"], relay_beam)
                run = lambda snr, spec=spec: relay_outage_mc(scene, spec, cfg.fading, snr, mc.trials,
                                                             mc.seed, mc.workers, mc.early_exit)
            else:
                family = "mirror" if system == "mirror" else meta_family
                levels = cfg.irs.quantization_levels if family != "mirror" else None
                design = build_design(family, scene, beam, grid, levels)
                h_g = None if cfg.fading.pointing_sigma > 0 else irs_geometric_gain(scene, beam, grid, design)
                run = lambda snr, design=design, h_g=h_g: irs_outage_mc(
                    scene, beam, grid, design, cfg.fading, snr, mc.trials, mc.seed, mc.workers,
                    v["fading.turbulence_mode"], mc.early_exit, h_g)
            curves[system] = run
        for s in snrs:
            snr = SnrConfig(float(s), v["snr.threshold_db"])
            for system, run in curves.items():
                est = run(snr)
                table.append(float(s), est.p_out, est.ci95_halfwidth, system, float(w0))
    return table


def run_delay(cfg: ExperimentConfig) -> ResultTable:
    """Delay dispersion and ISI span of anomalous reflection."""
    _require_sweep(cfg, "irs_length_m", "theta_i_deg", "theta_r_deg")
    v = cfg.values
    rate = v["delay.rate_bps"]
    table = ResultTable(["L_m", "theta_i_deg", "theta_r_deg", "d_max_s", "symbols_affected_at_rate"],
                        ["m", "deg", "deg", "s", f"symbols at {rate!r} bit/s"],
                        metadata=_metadata(cfg, "delay", rate_bps=repr(rate)))
    for x in cfg.sweep.values():
        point = {"irs_length_m": v["delay.irs_length_m"], "theta_i_deg": v["delay.theta_i_deg"],
                 "theta_r_deg": v["delay.theta_r_deg"]}
        point[cfg.sweep.variable] = float(x)
        angles = AnglePair(math.radians(point["theta_i_deg"]), math.radians(point["theta_r_deg"]))
        d_max = delay_dispersion(point["irs_length_m"], angles)
        table.append(point["irs_length_m"], point["theta_i_deg"], point["theta_r_deg"], d_max,
                     symbols_affected(d_max, rate))
    return table


COMMANDS = {
    "field-map": run_field_map,
    "power-sweep": run_power_sweep,
    "outage": run_outage,
    "delay": run_delay,
}
