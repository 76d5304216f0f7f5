"""
Riding the field: exact single-obstacle steering
================================================

Agents enter the influence circle of one obstacle already aligned with the
field and are steered with the exact law.  The quantity
``V cos(phi) - lambda V cos(beta)`` stays at zero along the way, i.e. each
agent stays on the streamline it started on.  The same is done for a moving
obstacle, where the conserved quantity lives in the obstacle's frame.
"""

import math
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.patches import Circle

from cavf import CavfParams, Obstacle, cavf, control_single
from cavf.fields import relative_heading
from cavf.simulation import AgentState, closed_loop

out = sys.argv[1] if len(sys.argv) > 1 else "streamlines.svg"
V = 1.0
cases = [("static", Obstacle((0.0, 0.0), CavfParams(1.0, 1.0, 3.0))),
         ("moving, V_o = 0.9", Obstacle((0.0, 0.0), CavfParams(1.0, 1.0, 3.0), V_o=0.9, theta_o=2.35))]

fig, axes = plt.subplots(1, 2, figsize=(12, 6))
for ax, (title, ob0) in zip(axes, cases):
    ref = relative_heading(V, 0.0, ob0.V_o, ob0.theta_o)
    for k in range(-8, 9):
        if k == 0:
            continue
        th = ref + math.pi + k * math.radians(10)
        p = (3.0 * math.cos(th), 3.0 * math.sin(th))
        agent = AgentState(p[0], p[1], cavf(p, ob0, V).heading, V)
        law = lambda t, a: control_single(a.position, a.psi, ob0.at(t), V).u
        stop = lambda t, a: math.dist(a.position, ob0.position(t)) > 3.0
        path = closed_loop(agent, law, 0.005, 20.0, stop)
        # plot in the obstacle frame so both panels read the same way
        xs = [a.x - ob0.position(t)[0] for t, a in path]
        ys = [a.y - ob0.position(t)[1] for t, a in path]
        ax.plot(xs, ys, lw=1)
    ax.add_patch(Circle((0, 0), 1.0, color="k"))
    ax.add_patch(Circle((0, 0), 3.0, fill=False, ls=":"))
    ax.set_aspect("equal")
    ax.set_title(title + " (obstacle frame)")

fig.savefig(out, metadata={"Date": None})
print("wrote", out)
