"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line with the measured
quantities, then asserts.  Criteria that the model cannot meet are left
failing; the analysis is kept in the decisions log outside the package.
"""
import math
import time
from pathlib import Path

import numpy as np
import pytest

from irsfso.channel import rytov_variance, sample_turbulence
from irsfso.config import load_config
from irsfso.designs import (QuantizationSpec, focusing_profile, linear_profile, quantize_profile,
                            uniform_profile)
from irsfso.experiments import run_delay, run_field_map, run_outage, run_power_sweep
from irsfso.geometry import AnglePair, SceneLayout
from irsfso.link import build_design, fit_loglog_slope, power_scaling_sweep, snr_gain_at
from irsfso.wave import BeamSource, UnitCellGrid, incident_power, lens_captured_power, reflected_field

from conftest import WAVELENGTH, plane_wave, small_grid
from oracles import array_factor

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture
def report(capsys):
    def _report(number, passed, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if passed else 'FAIL'} | {detail}")
    return _report


def test_criterion_1_delay_dispersion(report):
    t0 = time.perf_counter()
    cfg = load_config("sweep.start = 0.1\nsweep.stop = 0.2\nsweep.points = 2\n"
                      "delay.theta_i_deg = 0\ndelay.theta_r_deg = 60\ndelay.rate_bps = 10e9", command="delay")
    row = run_delay(cfg).rows[0]
    elapsed = time.perf_counter() - t0
    ok = (row[0] == 0.1 and abs(row[3] - 2.889e-10) <= 0.0005e-10 and row[4] == 3 and elapsed < 1.0)
    report(1, ok, f"d_max={row[3]:.4e} s, symbols={row[4]}, {elapsed:.3f} s")
    assert ok


def test_criterion_2_diversity_scaling(report):
    t0 = time.perf_counter()
    z = math.hypot(200, 300) + 500.0
    ratio = rytov_variance(1.4e-14, WAVELENGTH, z) / rytov_variance(1.4e-14, WAVELENGTH, z / 2)
    err = abs(ratio - 2 ** (11 / 6))
    elapsed = time.perf_counter() - t0
    ok = err <= 4 * np.finfo(float).eps * ratio and elapsed < 1.0
    report(2, ok, f"ratio={ratio!r}, |ratio - 2^(11/6)|={err:.1e}, {elapsed:.3f} s")
    assert ok


def _rms_rel(p_wave, p_go):
    mask = p_wave >= 0.5 * p_wave.max()
    return float(np.sqrt(np.mean((p_go[mask] - p_wave[mask]) ** 2)) / np.mean(p_wave[mask]))


@pytest.mark.slow
def test_criterion_3_field_map(report):
    t0 = time.perf_counter()
    cfg = load_config((CONFIGS / "field_map.cfg").read_text())
    table = run_field_map(cfg)
    line_y = cfg.values["field_map.line_y_m"]
    length = cfg.values["field_map.irs_length_m"]
    out = {}
    for wl in cfg.values["field_map.wavelengths_m"]:
        w = np.array([r[2] for r in table.where(engine="wave", wavelength_m=wl)])
        g = np.array([r[2] for r in table.where(engine="geometric", wavelength_m=wl)])
        x = np.array([r[1] for r in table.where(engine="wave", wavelength_m=wl)])
        out[wl] = (x, w, g)
    x, w, g = out[1550e-9]
    lobe = math.atan2(float(np.sum(x * w) / np.sum(w)), line_y)
    beamwidth = 1550e-9 / length
    rms_optical = _rms_rel(w, g)
    rms_mm = _rms_rel(out[5e-3][1], out[5e-3][2])
    elapsed = time.perf_counter() - t0
    checks = {"lobe": abs(lobe) <= beamwidth, "optical<=10%": rms_optical <= 0.10,
              "mmwave>50%": rms_mm > 0.50, "runtime": elapsed < 300}
    ok = all(checks.values())
    report(3, ok, f"lobe={lobe:.2e} rad (limit {beamwidth:.2e}), RMS 1550nm={rms_optical:.1%}, "
                  f"RMS 5mm={rms_mm:.1%}, {elapsed:.0f} s, failed={[k for k, v in checks.items() if not v]}")
    assert ok


@pytest.mark.slow
def test_criterion_4_power_scaling(report):
    t0 = time.perf_counter()
    cfg = load_config((CONFIGS / "power_sweep.cfg").read_text(), ["sweep.points=44"])  # 10 points per decade
    table = run_power_sweep(cfg)

    def curve(design, engine):
        rows = table.where(design=design, engine=engine)
        return np.array([r[0] for r in rows]), np.array([r[2] for r in rows])

    lf, ff = curve("focusing", "wave")
    s1 = fit_loglog_slope(lf, ff, 1e-4, 1e-3)
    s2 = fit_loglog_slope(lf, ff, 2e-2, 2e-1)
    s3 = fit_loglog_slope(lf, ff, 1.0, 2.0)
    lm, fm = curve("mirror", "wave")
    regime1 = lf <= 1e-3
    mirror_ok = bool(np.all(fm[regime1] >= ff[regime1]))
    go_err, worst = 0.0, None
    for design in ("mirror", "linear", "focusing"):
        lw, fw = curve(design, "wave")
        _, fg = curve(design, "geometric")
        sel = lw >= 2e-2
        err = np.abs(fg[sel] - fw[sel]) / fw[sel]
        if err.max() > go_err:
            go_err, worst = float(err.max()), (design, float(lw[sel][np.argmax(err)]))

    # convergence of the coarse strip cells against half-wavelength point cells
    scene, beam = cfg.scene, cfg.beam
    conv = 0.0
    for n in (64, 1290, 12903):
        length = n * 10 * WAVELENGTH
        coarse = power_scaling_sweep(scene, beam, "focusing", [length], "wave", 10 * WAVELENGTH, "segment")[0]
        fine = power_scaling_sweep(scene, beam, "focusing", [length], "wave", WAVELENGTH / 2, "point")[0]
        conv = max(conv, abs(coarse.fraction - fine.fraction) / fine.fraction)
    elapsed = time.perf_counter() - t0
    checks = {"regime1 slope": abs(s1 - 2) <= 0.15, "regime2 slope": abs(s2 - 1) <= 0.15,
              "saturation": abs(s3) < 0.05, "mirror>=meta": mirror_ok, "GO<=10%": go_err <= 0.10,
              "convergence<=3%": conv <= 0.03, "runtime": elapsed < 1800}
    ok = all(checks.values())
    report(4, ok, f"slopes {s1:.3f}/{s2:.3f}/{s3:.1e}, mirror>=meta {mirror_ok}, GO max err {go_err:.1%} ({worst[0]} at L={worst[1]:.3g} m), "
                  f"10lambda vs lambda/2 {conv:.2%}, {elapsed:.0f} s")
    assert ok


@pytest.mark.slow
def test_criterion_5_outage_shape(report):
    t0 = time.perf_counter()
    cfg = load_config((CONFIGS / "outage.cfg").read_text())
    table = run_outage(cfg)
    snrs = sorted({r[0] for r in table.rows})
    lo, hi = snrs[0], snrs[-1]

    def p(system, w0, snr):
        return next(r[1] for r in table.where(system=system, w0=w0) if r[0] == snr)

    def curve(system, w0):
        rows = table.where(system=system, w0=w0)
        return [r[0] for r in rows], [r[1] for r in rows]

    a_ok, b_ok, detail = True, True, []
    for w0 in (1e-3, 2.5e-3):
        m, mi, r = p("metasurface", w0, lo), p("mirror", w0, lo), p("relay", w0, lo)
        a_ok &= m < mi < r
        hm, hmi, hr = p("metasurface", w0, hi), p("mirror", w0, hi), p("relay", w0, hi)
        b_ok &= hr < hm and hr < hmi
        detail.append(f"w0={w0 * 1e3:g}mm low({lo:g} dB) meta/mirror/relay={m:.3g}/{mi:.3g}/{r:.3g} "
                      f"high({hi:g} dB)={hm:.3g}/{hmi:.3g}/{hr:.3g}")
    gains = {w0: snr_gain_at(0.1, curve("metasurface", w0), curve("relay", w0)) for w0 in (1e-3, 2.5e-3)}
    c_ok = gains[2.5e-3] > gains[1e-3]
    elapsed = time.perf_counter() - t0
    ok = a_ok and b_ok and c_ok and elapsed < 1200
    report(5, ok, f"(a) {a_ok} (b) {b_ok} (c) {c_ok}: gain@0.1 1mm={gains[1e-3]:.2f} dB, "
                  f"2.5mm={gains[2.5e-3]:.2f} dB; " + "; ".join(detail) + f"; {elapsed:.0f} s")
    assert ok


def test_criterion_6_array_factor_oracle(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    worst = 0.0
    for n, ti in ((8, 0.0), (33, 0.3), (64, -0.5)):
        grid = small_grid(n)
        phases = rng.uniform(0, 2 * math.pi, n)
        th = np.linspace(-1.45, 1.45, 2001)
        pts = np.column_stack([1e9 * np.sin(th), 1e9 * np.cos(th)])
        e = np.abs(reflected_field(plane_wave(ti), grid, phases, pts))
        af = array_factor(grid.offsets, phases, WAVELENGTH, ti, th)
        worst = max(worst, float(np.max(np.abs(e / e.max() - af / af.max()))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed < 10
    report(6, ok, f"max normalized error {worst:.2e}, {elapsed:.2f} s")
    assert ok


def test_criterion_7_statistics_and_reproducibility(report):
    t0 = time.perf_counter()
    s2 = rytov_variance(1.4e-14, WAVELENGTH, math.hypot(200, 300) + 500.0)
    h = sample_turbulence(s2, np.random.default_rng(7), 1_000_000)
    mean, var_ratio = float(h.mean()), float(np.log(h).var() / s2)
    small = {
        "field-map": "sweep.points = 50\nfield_map.irs_length_m = 0.01",
        "power-sweep": "sweep.start = 1e-4\nsweep.stop = 1e-3\nsweep.points = 3",
        "outage": "mc.trials = 2000\nsweep.points = 3\nirs.length_m = 0.01\nmc.workers = 2",
        "delay": "",
    }
    runners = {"field-map": run_field_map, "power-sweep": run_power_sweep, "outage": run_outage,
               "delay": run_delay}
    identical = all(runners[c](load_config(t, command=c)).to_csv() == runners[c](load_config(t, command=c)).to_csv()
                    for c, t in small.items())
    elapsed = time.perf_counter() - t0
    ok = 0.997 <= mean <= 1.003 and 0.99 <= var_ratio <= 1.01 and identical and elapsed < 60
    report(7, ok, f"E[h_a]={mean:.5f}, Var[ln h_a]/sigma_R^2={var_ratio:.5f}, "
                  f"tables bit-identical={identical}, {elapsed:.1f} s")
    assert ok


def test_criterion_8_energy_conservation(report):
    t0 = time.perf_counter()
    grid = small_grid(512)
    ti = math.radians(30)
    beam = plane_wave(ti)
    focus = focusing_profile(grid, beam, (0.0, 0.05))
    designs = {"uniform": uniform_profile(grid), "linear": linear_profile(grid, AnglePair(ti, 0.0), WAVELENGTH),
               "focusing": focus, "2-level": quantize_profile(focus, QuantizationSpec(2))}
    p_in = incident_power(beam, grid)
    radius = 10.0
    th = np.linspace(-math.pi / 2, math.pi / 2, 40001)[1:-1]
    pts = np.column_stack([radius * np.sin(th), radius * np.cos(th)])
    ratios = {}
    for name, prof in designs.items():
        p = np.abs(reflected_field(beam, grid, prof, pts)) ** 2
        ratios[name] = float(np.sum(p) * radius * (th[1] - th[0])) / p_in
    elapsed = time.perf_counter() - t0
    ok = all(r <= 1.02 for r in ratios.values()) and elapsed < 120
    report(8, ok, "scattered/incident " + ", ".join(f"{k}={v:.4f}" for k, v in ratios.items())
           + f", {elapsed:.1f} s")
    assert ok
