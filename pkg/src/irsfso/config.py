"""Experiment configuration: a flat ``section.key_unit = value`` text format.

One assignment per line; ``#`` starts a comment.  Values are Python
literals (numbers, quoted strings, ``[lists]``); a bare word is read as a
string.  The unit suffix is part of every key (``_m``, ``_deg``, ``_db``,
``_w``, ...), so lengths are always meters in the file.  Unset keys take the
defaults below, which describe the reference link (Tx at (-200, 300) m, IRS
at the origin, Rx lens 10 cm at (0, 500) m, 1550 nm, w0 = 1 mm).
"""
from __future__ import annotations

import ast
import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .channel import FadingModel
from .geometry import SceneLayout
from .link import DESIGN_FAMILIES, SnrConfig
from .wave import BeamSource, UnitCellGrid, lens_sample_count


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


TECHNOLOGIES = {
    # technology -> (default design family, control resolution)
    "mirror": ("mirror", "single rigid tilt"),
    "micro-mirror": ("mirror", "per-element tilt"),
    "static-meta": ("focusing", "fixed phase profile"),
    "tunable-meta": ("focusing", "reconfigurable phase profile"),
}
SWEEP_VARIABLES = ("x_m", "irs_length_m", "transmit_snr_db", "theta_i_deg", "theta_r_deg")
SWEEP_DEFAULTS = {
    "field-map": ("x_m", -0.3, 0.3, 601, "linear"),
    "power-sweep": ("irs_length_m", 1e-4, 2.0, 22, "log"),
    "outage": ("transmit_snr_db", 12.0, 48.0, 19, "linear"),
    "delay": ("irs_length_m", 0.05, 0.2, 4, "linear"),
}


def _positive(v):
    return v > 0


def _nonneg(v):
    return v >= 0


def _finite(v):
    return math.isfinite(v)


def _one_of(*opts):
    return lambda v: v in opts


def _positive_list(v):
    return len(v) > 0 and all(x > 0 for x in v)


def _subset_of(*opts):
    return lambda v: len(v) > 0 and all(x in opts for x in v)


# key -> (type, default, check, description of the check)
SCHEMA = {
    "scene.tx_x_m": (float, -200.0, _finite, "finite"),
    "scene.tx_y_m": (float, 300.0, _finite, "finite"),
    "scene.irs_x_m": (float, 0.0, _finite, "finite"),
    "scene.irs_y_m": (float, 0.0, _finite, "finite"),
    "scene.irs_normal_deg": (float, 0.0, lambda v: abs(v) < 180, "in (-180, 180)"),
    "scene.rx_x_m": (float, 0.0, _finite, "finite"),
    "scene.rx_y_m": (float, 500.0, _finite, "finite"),
    "scene.rx_lens_length_m": (float, 0.1, _positive, "> 0"),
    "scene.rx_lens_normal_deg": (float, 180.0, _finite, "finite"),
    "beam.kind": (str, "gaussian", _one_of("gaussian", "plane"), "gaussian or plane"),
    "beam.wavelength_m": (float, 1550e-9, _positive, "> 0"),
    "beam.waist_m": (float, 1e-3, _positive, "> 0"),
    "beam.power_w": (float, 1.0, _positive, "> 0"),
    "irs.length_m": (float, 0.5, _positive, "> 0"),
    "irs.cell_spacing_wavelengths": (float, 0.5, _positive, "> 0"),
    "irs.cell_model": (str, "point", _one_of("point", "segment"), "point or segment"),
    "irs.technology": (str, "tunable-meta", _one_of(*TECHNOLOGIES), "one of " + ", ".join(TECHNOLOGIES)),
    "irs.design": (str, "auto", _one_of("auto", *DESIGN_FAMILIES), "auto or a design family"),
    "irs.quantization_levels": (int, 0, lambda v: v == 0 or v >= 2, "0 (continuous) or >= 2"),
    "fading.kappa_per_m": (float, 0.43e-3, _nonneg, ">= 0"),
    "fading.cn2_per_m23": (float, 1.4e-14, _nonneg, ">= 0"),
    "fading.pointing_sigma_m": (float, 0.0, _nonneg, ">= 0"),
    "fading.responsivity_a_per_w": (float, 0.5, lambda v: 0 < v <= 1, "in (0, 1]"),
    "fading.turbulence_mode": (str, "end-to-end", _one_of("end-to-end", "per-hop"), "end-to-end or per-hop"),
    "snr.transmit_snr_db": (float, 20.0, _finite, "finite"),
    "snr.threshold_db": (float, 0.0, _finite, "finite"),
    "sweep.variable": (str, None, _one_of(*SWEEP_VARIABLES), "one of " + ", ".join(SWEEP_VARIABLES)),
    "sweep.start": (float, None, _finite, "finite"),
    "sweep.stop": (float, None, _finite, "finite"),
    "sweep.points": (int, None, _positive, "> 0"),
    "sweep.scale": (str, None, _one_of("linear", "log"), "linear or log"),
    "mc.trials": (int, 100_000, lambda v: v >= 1000, ">= 1000"),
    "mc.seed": (int, 1, lambda v: 0 <= v < 2 ** 64, "in [0, 2**64)"),
    "mc.workers": (int, 1, _positive, "> 0"),
    "mc.early_exit": (bool, True, lambda v: True, ""),
    "relay.x_m": (float, 0.0, _finite, "finite"),
    "relay.y_m": (float, 0.0, _finite, "finite"),
    "relay.power_split": (float, 0.5, lambda v: 0 < v < 1, "in (0, 1)"),
    "relay.lens_length_m": (float, 0.1, _positive, "> 0"),
    "field_map.line_y_m": (float, 200.0, _positive, "> 0"),
    "field_map.irs_length_m": (float, 0.2, _positive, "> 0"),
    "field_map.theta_i_deg": (float, 30.0, lambda v: abs(v) < 90, "in (-90, 90)"),
    "field_map.theta_r_deg": (float, 0.0, lambda v: abs(v) < 90, "in (-90, 90)"),
    "field_map.power_density_w_per_m": (float, 1.0, _positive, "> 0"),
    "field_map.wavelengths_m": (list, [1550e-9, 5e-3], _positive_list, "non-empty, all > 0"),
    "power_sweep.designs": (list, ["mirror", "linear", "focusing"], _subset_of(*DESIGN_FAMILIES),
                            "non-empty subset of " + ", ".join(DESIGN_FAMILIES)),
    "power_sweep.engines": (list, ["wave", "geometric"], _subset_of("wave", "geometric"),
                            "non-empty subset of wave, geometric"),
    "outage.waists_m": (list, [1e-3, 2.5e-3], _positive_list, "non-empty, all > 0"),
    "outage.systems": (list, ["mirror", "metasurface", "relay"], _subset_of("mirror", "metasurface", "relay"),
                       "non-empty subset of mirror, metasurface, relay"),
    "delay.theta_i_deg": (float, 0.0, lambda v: abs(v) < 90, "in (-90, 90)"),
    "delay.theta_r_deg": (float, 60.0, lambda v: abs(v) < 90, "in (-90, 90)"),
    "delay.irs_length_m": (float, 0.1, _positive, "> 0"),
    "delay.rate_bps": (float, 10e9, _positive, "> 0"),
    "wave.lens_samples": (int, 0, _nonneg, ">= 0 (0 = automatic)"),
    "wave.samples_per_period": (int, 8, lambda v: v >= 2, ">= 2"),
}


def _stem(key):
    section, _, name = key.partition(".")
    return section, name.split("_")[:-1]


def _coerce(key, kind, value):
    if kind is bool:
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.lower() in ("true", "false"):
            return value.lower() == "true"
        raise ConfigError(key, f"expected true/false, got {value!r}")
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(key, f"expected a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(key, f"expected a string, got {value!r}")
        return value
    if not isinstance(value, (list, tuple)):
        value = [value]
    return [float(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else v for v in value]


def _parse_value(text):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def parse_assignments(text: str) -> dict:
    """Raw ``key -> value`` pairs; rejects unknown keys and duplicates."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", "expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        check_key(key)
        if key in out:
            raise ConfigError(key, "set more than once")
        out[key] = _parse_value(raw)
    return out


def check_key(key: str):
    if key in SCHEMA:
        return
    for known in SCHEMA:
        if _stem(known) == _stem(key) and _stem(key)[1]:
            raise ConfigError(key, f"unit mismatch, expected {known}")
    raise ConfigError(key, "unknown key")


@dataclass(frozen=True)
class IrsConfig:
    grid: UnitCellGrid
    design: str
    quantization_levels: int | None
    technology: str

    @property
    def control_resolution(self) -> str:
        base = TECHNOLOGIES[self.technology][1]
        if self.quantization_levels:
            return f"{base}, {self.quantization_levels}-level phase"
        return base


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    points: int
    scale: str

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.logspace(math.log10(self.start), math.log10(self.stop), self.points)
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class McSettings:
    trials: int
    seed: int
    workers: int
    early_exit: bool


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated configuration.

    ``values`` holds every key (defaults filled in); the other fields are the
    domain objects built from them.
    """

    values: dict
    scene: SceneLayout
    beam: BeamSource
    irs: IrsConfig
    fading: FadingModel
    snr: SnrConfig
    sweep: SweepSpec
    mc: McSettings

    def __getitem__(self, key):
        return self.values[key]


def _build(values: dict) -> ExperimentConfig:
    v = values
    try:
        scene = SceneLayout((v["scene.tx_x_m"], v["scene.tx_y_m"]), (v["scene.irs_x_m"], v["scene.irs_y_m"]),
                            math.radians(v["scene.irs_normal_deg"]), (v["scene.rx_x_m"], v["scene.rx_y_m"]),
                            v["scene.rx_lens_length_m"], math.radians(v["scene.rx_lens_normal_deg"]))
    except ValueError as exc:
        raise ConfigError("scene", str(exc)) from None
    beam = BeamSource.aimed(v["beam.kind"], v["beam.wavelength_m"], v["beam.waist_m"], v["beam.power_w"],
                            scene.tx_position, scene.irs_center)
    grid = UnitCellGrid.spanning(v["irs.length_m"], v["irs.cell_spacing_wavelengths"] * v["beam.wavelength_m"],
                                 scene.irs_center, scene.irs_normal_angle, v["irs.cell_model"])
    design = v["irs.design"]
    if design == "auto":
        design = TECHNOLOGIES[v["irs.technology"]][0]
    irs = IrsConfig(grid, design, v["irs.quantization_levels"] or None, v["irs.technology"])
    fading = FadingModel(v["fading.kappa_per_m"], v["fading.cn2_per_m23"], v["fading.pointing_sigma_m"],
                         v["fading.responsivity_a_per_w"])
    snr = SnrConfig(v["snr.transmit_snr_db"], v["snr.threshold_db"])
    sweep = SweepSpec(v["sweep.variable"], v["sweep.start"], v["sweep.stop"], v["sweep.points"], v["sweep.scale"])
    if sweep.scale == "log" and not (sweep.start > 0 and sweep.stop > 0):
        raise ConfigError("sweep.start", "log sweep needs positive bounds")
    if not sweep.stop > sweep.start:
        raise ConfigError("sweep.stop", "sweep range is degenerate (stop must exceed start)")
    mc = McSettings(v["mc.trials"], v["mc.seed"], v["mc.workers"], v["mc.early_exit"])
    cfg = ExperimentConfig(values, scene, beam, irs, fading, snr, sweep, mc)
    _check_lens_sampling(cfg)
    return cfg


def _check_lens_sampling(cfg: ExperimentConfig):
    fixed = cfg["wave.lens_samples"]
    if not fixed:
        return
    grid = cfg.irs.grid
    if cfg.sweep.variable == "irs_length_m":
        grid = UnitCellGrid.spanning(max(cfg.sweep.start, cfg.sweep.stop), grid.cell_spacing, grid.center,
                                     grid.normal_angle, grid.cell_model)
    need = lens_sample_count(cfg.scene, cfg.beam, grid, per_period=cfg["wave.samples_per_period"])
    if fixed < need:
        raise ConfigError("wave.lens_samples",
                          f"{fixed} samples undersample the field across the lens; need >= {need}")


def load_config(text: str = "", overrides=(), command: str | None = None) -> ExperimentConfig:
    """Parse, apply defaults and validate.

    ``overrides`` are ``"key=value"`` strings applied after ``text``.
    ``command`` selects the default sweep axis when ``sweep.*`` keys are
    absent.
    """
    raw = parse_assignments(text)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(item, "override must be key=value")
        key, val = (part.strip() for part in item.split("=", 1))
        check_key(key)
        raw[key] = _parse_value(val)

    sweep_default = SWEEP_DEFAULTS.get(command or "outage")
    if command is not None and command not in SWEEP_DEFAULTS:
        raise ConfigError("command", f"unknown command {command!r}")
    values = {}
    sweep_keys = ("sweep.variable", "sweep.start", "sweep.stop", "sweep.points", "sweep.scale")
    for key, (kind, default, check, desc) in SCHEMA.items():
        if key in sweep_keys:
            default = sweep_default[sweep_keys.index(key)]
            if kind is float:
                default = float(default)
        val = _coerce(key, kind, raw[key]) if key in raw else default
        if isinstance(val, list):
            val = list(val)
        if not check(val):
            raise ConfigError(key, f"invalid value {val!r}, must be {desc}")
        values[key] = val
    return _build(values)


def dump_config(cfg: ExperimentConfig) -> str:
    """Canonical text form: every key, sorted, values in ``repr`` form."""
    return "".join(f"{key} = {cfg.values[key]!r}\n" for key in sorted(cfg.values))


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(dump_config(cfg).encode()).hexdigest()
