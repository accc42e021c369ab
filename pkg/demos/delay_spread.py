"""Inter-symbol interference from a large anomalously reflecting surface.

Light reflected from opposite ends of an IRS travels different distances when
the surface steers the beam away from the specular direction.  A 10 cm
surface turning a normally incident beam by 60 degrees spreads arrivals over
about 0.29 ns, three symbol periods at 10 Gbit/s.

Run:  python demos/delay_spread.py
"""
from irsfso.config import load_config
from irsfso.experiments import run_delay

cfg = load_config("sweep.variable = theta_r_deg\nsweep.start = 0\nsweep.stop = 80\nsweep.points = 9\n"
                  "delay.irs_length_m = 0.1", command="delay")
for L, ti, tr, d_max, symbols in run_delay(cfg).rows:
    print(f"theta_r = {tr:5.1f} deg: D_max = {d_max * 1e12:7.1f} ps, symbols affected at 10 Gbit/s: {symbols}")
