"""
The three bundled scenarios
===========================

A forest of static trees with a fixed gain, a patch of airspace with five
movers and a gain that grows as the nearest surface gets closer, and mixed
random clutter.  Each run is checked for clearance and for returning to the
desired heading, then plotted.
"""

import sys
import time
from pathlib import Path

import numpy as np

from cavf import check_collision, load_scenario, run
from cavf.export import plot_run

outdir = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
outdir.mkdir(parents=True, exist_ok=True)

for name in ("scenario1_forest", "scenario2_airspace", "scenario3_clutter"):
    sc = load_scenario(name)
    t0 = time.perf_counter()
    tr = run(sc)
    rep = check_collision(tr)
    u = tr.column("u")
    print(f"{name}: {len(sc.obstacles)} obstacles, {time.perf_counter() - t0:.2f} s, "
          f"min clearance {rep.min_clearance:.3f} m, max |u| {np.nanmax(np.abs(u)):.2f} rad/s, "
          f"final heading error {rep.heading_error:.1e} rad")
    plot_run(outdir / f"{name}.svg", sc.obstacles, tr, sc.agent.V, sc.mix, resolution=30, title=name)
