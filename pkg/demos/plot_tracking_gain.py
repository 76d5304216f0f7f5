"""
Choosing the tracking gain
==========================

With ``u = -K (psi - psi_ca) + u_m`` the heading error decays as
``exp(-K t)``.  Requiring it to fall from the worst case ``pi`` to ``e_psi``
before the agent has covered half the gap ``delta`` between two obstacles
gives ``K = 2 V ln(pi / e_psi) / delta``.
"""

import math
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from cavf import control_tracking, tracking_gain
from cavf.simulation import AgentState, closed_loop

out = sys.argv[1] if len(sys.argv) > 1 else "tracking_gain.svg"
V, e_psi, delta = 1.0, 0.01, 0.516
K = tracking_gain(V, e_psi, delta)
print(f"K = {K:.3f} for delta = {delta} m")

fig, ax = plt.subplots(figsize=(7, 4))
for c in (math.pi, math.pi / 2, 0.1):
    path = closed_loop(AgentState(0, 0, c, V), lambda t, a: control_tracking(a, 0.0, 0.0, K).u, 0.001, 0.6)
    t = np.array([p[0] for p in path])
    e = np.abs([p[1].psi for p in path])
    ax.semilogy(t, e, label=f"c = {c:.2f}")
    print(f"c={c:.3f}  |e| at t=delta/2V: {e[np.searchsorted(t, delta / (2 * V) - 1e-12)]:.5f}")
ax.axhline(e_psi, color="k", ls=":")
ax.axvline(delta / (2 * V), color="k", ls="--")
ax.set_xlabel("t [s]")
ax.set_ylabel("|heading error| [rad]")
ax.legend()
fig.savefig(out, metadata={"Date": None})
print("wrote", out)
