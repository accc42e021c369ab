"""How much of the laser power reaches a 10 cm lens as the IRS grows.

For tiny surfaces the lens sits in the IRS far field and the received power
grows as L**2: the surface collects power in proportion to L and its beam
narrows in proportion to 1/L.  Once the reflected beam fits on the lens only
the collection term is left (slope 1), and when the IRS is wider than the
incident footprint nothing grows any more.  A tilted mirror wins slightly for
tiny sizes because rotation enlarges its projected aperture, but it cannot
focus, so it saturates at the share of the diverging beam the lens catches.

Run:  python demos/power_scaling.py  (about a minute)
"""
from pathlib import Path

import numpy as np

from irsfso.config import load_config
from irsfso.experiments import run_power_sweep
from irsfso.link import fit_loglog_slope

cfg = load_config((Path(__file__).parents[1] / "configs" / "power_sweep.cfg").read_text())
table = run_power_sweep(cfg)

for design in cfg.values["power_sweep.designs"]:
    rows = table.where(design=design, engine="wave")
    L = np.array([r[0] for r in rows])
    f = np.array([r[2] for r in rows])
    print(f"{design:9s} slope 1e-4..1e-3 m: {fit_loglog_slope(L, f, 1e-4, 1e-3):.2f}, "
          f"2e-2..2e-1 m: {fit_loglog_slope(L, f, 2e-2, 2e-1):.2f}, plateau {f[-1]:.3f}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    raise SystemExit(0)

fig, ax = plt.subplots(figsize=(6, 4))
for design in cfg.values["power_sweep.designs"]:
    for engine, style in (("wave", "-"), ("geometric", ":")):
        rows = table.where(design=design, engine=engine)
        ax.loglog([r[0] for r in rows], [r[2] for r in rows], style, label=f"{design} ({engine})")
ax.set_xlabel("IRS length L (m)")
ax.set_ylabel("fraction of transmit power")
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig("power_scaling.png", dpi=150)
