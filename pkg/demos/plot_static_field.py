"""
A single static obstacle
========================

The field around one circular obstacle, for several values of the shaping
parameter ``a``.  Small ``a`` bends the flow gradually across the whole
influence annulus; large ``a`` keeps the free stream almost untouched until
close to the surface and then turns it hard.
"""

import math
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from matplotlib.patches import Circle

from cavf import CavfParams, Obstacle, gamma
from cavf.export import field_grid

out = sys.argv[1] if len(sys.argv) > 1 else "static_field.svg"
bounds = (-4, 4, -4, 4)

fig, axes = plt.subplots(1, 4, figsize=(16, 4.4))
for ax, a in zip(axes, (0.1, 0.3, 3.0, 10.0)):
    ob = Obstacle((0.0, 0.0), CavfParams(a, r_o=1.0, r_i=3.0, psi_d=0.0))
    g = field_grid([ob], 1.0, bounds, 25)
    ok = g[:, 6] == 0
    ax.quiver(g[ok, 0], g[ok, 1], g[ok, 2], g[ok, 3], color="tab:red", width=0.003)
    ax.add_patch(Circle((0, 0), 1.0, color="k"))
    ax.add_patch(Circle((0, 0), 3.0, fill=False, ls=":"))
    ax.set_title(f"a = {a:g}")
    ax.set_aspect("equal")
    ax.set_xlim(bounds[:2])
    ax.set_ylim(bounds[2:])

# how much radial motion survives across the annulus, per a
for a in (0.1, 0.3, 1.0, 3.0, 10.0):
    p = CavfParams(a, 1.0, 3.0)
    print(f"a={a:5g}  gamma(1.5)={gamma(1.5, p):.3f}  gamma(2.0)={gamma(2.0, p):.3f}  gamma(2.5)={gamma(2.5, p):.3f}")

fig.savefig(out, metadata={"Date": None})
print("wrote", out)
