"""
Blending several fields
=======================

Two static obstacles and one mover with overlapping influence regions.  Close
to any surface the blend snaps to that obstacle's own field; in between,
weights follow the relative surface distances.
"""

import math
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from cavf import CavfParams, Obstacle, mixed_cavf
from cavf.export import plot_run

out = sys.argv[1] if len(sys.argv) > 1 else "mixed_field.svg"
p = CavfParams(1.0, r_o=1.0, r_i=2.0)
obstacles = [Obstacle((-1.5, 1.8), p), Obstacle((1.7, 1.5), p),
             Obstacle((0.2, -1.6), p, V_o=0.9, theta_o=math.pi / 2)]

# a few weights along the line y = 0.1
for x in np.linspace(-2, 2, 5):
    m = mixed_cavf((x, 0.1), obstacles, 1.0)
    w = ", ".join(f"{v:.2f}" for v in m.weights.raw)
    print(f"x={x:+.1f}  weights [{w}]  ({m.weights.branch})  heading {m.heading:+.3f}")

plot_run(out, obstacles, bounds=(-4, 4, -4, 4), resolution=30, title="mixed field at t = 0")
print("wrote", out)
