import math

import numpy as np
import pytest

from irsfso.config import load_config
from irsfso.experiments import ResultTable, run_delay, run_field_map, run_outage, run_power_sweep


def half_power_width(x, p):
    x, p = np.asarray(x), np.asarray(p)
    above = x[p >= 0.5 * p.max()]
    return above.max() - above.min()


def test_delay_example_row():
    cfg = load_config("sweep.start = 0.1\nsweep.stop = 0.2\nsweep.points = 2", command="delay")
    t = run_delay(cfg)
    row = t.rows[0]
    assert row[0] == 0.1 and row[3] == pytest.approx(2.889e-10, rel=2e-4) and row[4] == 3
    assert t.rows[1][3] == pytest.approx(2 * row[3])


def test_delay_specular_row_is_zero():
    cfg = load_config("sweep.variable = theta_r_deg\nsweep.start = 0\nsweep.stop = 60\nsweep.points = 2",
                      command="delay")
    t = run_delay(cfg)
    assert t.rows[0][3] == 0.0 and t.rows[0][4] == 0


def test_field_map_two_samples():
    cfg = load_config("sweep.points = 2\nfield_map.irs_length_m = 0.01", command="field-map")
    t = run_field_map(cfg)
    for wl in cfg.values["field_map.wavelengths_m"]:
        for engine in ("wave", "geometric"):
            assert len(t.where(engine=engine, wavelength_m=wl)) == 2


def test_field_map_peak_and_mmwave_width():
    cfg = load_config("sweep.points = 401\nfield_map.irs_length_m = 0.02", command="field-map")
    t = run_field_map(cfg)
    widths = {}
    for wl in cfg.values["field_map.wavelengths_m"]:
        rows = t.where(engine="wave", wavelength_m=wl)
        x = [r[1] for r in rows]
        p = [r[2] for r in rows]
        widths[wl] = half_power_width(x, p)
        if wl < 1e-3:
            assert abs(x[int(np.argmax(p))]) < 0.02
    assert widths[5e-3] > widths[1550e-9]


def test_power_sweep_columns_and_growth():
    cfg = load_config("sweep.start = 1e-4\nsweep.stop = 1e-2\nsweep.points = 3\n"
                      "irs.cell_spacing_wavelengths = 10\nirs.cell_model = segment", command="power-sweep")
    t = run_power_sweep(cfg)
    assert t.columns == ["L_m", "N", "fraction", "engine", "design"]
    assert {r[4] for r in t.rows} == {"mirror", "linear", "focusing"}
    for design in ("mirror", "linear", "focusing"):
        frac = [r[2] for r in t.where(design=design, engine="wave")]
        assert frac == sorted(frac)


def test_outage_smoke_and_determinism():
    text = ("mc.trials = 1000\nsweep.points = 3\nirs.length_m = 0.02\n"
            "outage.waists_m = [1e-3]")
    t1 = run_outage(load_config(text, command="outage"))
    t2 = run_outage(load_config(text, command="outage"))
    assert all(r[2] > 0 for r in t1.rows)
    assert {r[3] for r in t1.rows} == {"mirror", "metasurface", "relay"}
    assert t1.to_csv() == t2.to_csv()


def test_csv_layout():
    cfg = load_config("", command="delay")
    text = run_delay(cfg).to_csv()
    lines = text.splitlines()
    meta = [l for l in lines if l.startswith("#")]
    assert any(l.startswith("# config_hash: ") for l in meta)
    assert any(l.startswith("# seed: ") for l in meta)
    body = [l for l in lines if not l.startswith("#")]
    assert body[0] == "L_m,theta_i_deg,theta_r_deg,d_max_s,symbols_affected_at_rate"
    assert body[1].startswith("m,deg,deg,s,")
    assert len({len(l.split(",")) for l in body}) == 1


def test_result_table_rectangular():
    t = ResultTable(["a", "b"], ["m", "s"])
    with pytest.raises(ValueError):
        t.append(1.0)
    with pytest.raises(ValueError):
        ResultTable(["a"], [])


def test_wrong_sweep_variable():
    from irsfso.config import ConfigError
    with pytest.raises(ConfigError):
        run_outage(load_config("sweep.variable = x_m\nsweep.start = 0\nsweep.stop = 1"))
