"""Wave optics versus ray optics for a 20 cm IRS.

A plane wave arrives at 30 degrees and a linear phase profile sends it
straight up.  On the line y = 200 m the geometric-optics picture is a flat
strip of width L with density cos(30 deg).  At 1550 nm the wave solution
follows the strip apart from Fresnel ripple at its edges; at a 5 mm
(mmWave-like) wavelength the same surface is only 40 wavelengths long and the
reflection spreads into a broad diffraction lobe.

Run:  python demos/field_map.py  (writes field_map.png if matplotlib is installed)
"""
from pathlib import Path

import numpy as np

from irsfso.config import load_config
from irsfso.experiments import run_field_map

cfg = load_config((Path(__file__).parents[1] / "configs" / "field_map.cfg").read_text(),
                  ["sweep.points=1200"])
table = run_field_map(cfg)

for wl in cfg.values["field_map.wavelengths_m"]:
    wave = np.array([r[2] for r in table.where(engine="wave", wavelength_m=wl)])
    x = np.array([r[1] for r in table.where(engine="wave", wavelength_m=wl)])
    above = x[wave >= 0.5 * wave.max()]
    print(f"lambda = {wl:.3g} m: peak {wave.max():.3f} W/m, half-power width {above.max() - above.min():.3f} m")

try:
    import matplotlib.pyplot as plt
except ImportError:
    raise SystemExit(0)

fig, ax = plt.subplots(figsize=(7, 4))
for wl in cfg.values["field_map.wavelengths_m"]:
    for engine, style in (("wave", "-"), ("geometric", "--")):
        rows = table.where(engine=engine, wavelength_m=wl)
        ax.plot([r[1] for r in rows], [r[2] for r in rows], style, label=f"{engine}, {wl:.3g} m")
ax.set_xlabel("x (m)")
ax.set_ylabel("power density (W/m)")
ax.legend()
fig.tight_layout()
fig.savefig("field_map.png", dpi=150)
