"""Trajectory and field-grid export, plus SVG rendering of a run."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateBlendError, DomainError
from .fields import DEFAULT_VARTHETA, Obstacle
from .mixing import MixConfig, mixed_cavf
from .simulation import Sample, Trajectory

TRAJECTORY_COLUMNS = ("t", "x", "y", "psi", "u", "min_clearance")
GRID_COLUMNS = ("x", "y", "hx", "hy", "lambda_min", "w_snap", "inside")

# written in place of field values at points inside an obstacle
INSIDE_SENTINEL = "nan"


def _fmt(v: float) -> str:
    if isinstance(v, float) and math.isnan(v):
        return "nan"
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(float(v), ".12g")


def trajectory_csv(trajectory: Trajectory) -> str:
    buf = io.StringIO()
    buf.write(",".join(TRAJECTORY_COLUMNS) + "\n")
    for s in trajectory.samples:
        buf.write(",".join(_fmt(getattr(s, c)) for c in TRAJECTORY_COLUMNS) + "\n")
    return buf.getvalue()


def export_trajectory(trajectory: Trajectory, path) -> Path:
    """Write one row per sample with 12 significant digits."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(trajectory_csv(trajectory))
    return path


def read_trajectory(path, psi_d: float = 0.0, e_psi: float = 0.01) -> Trajectory:
    """Read a trajectory file written by :func:`export_trajectory`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != TRAJECTORY_COLUMNS:
            raise DomainError(f"{path}: expected header {','.join(TRAJECTORY_COLUMNS)}")
        samples = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(TRAJECTORY_COLUMNS):
                raise DomainError(f"{path}:{lineno}: expected {len(TRAJECTORY_COLUMNS)} fields, got {len(row)}")
            try:
                vals = [float(v) for v in row]
            except ValueError as exc:
                raise DomainError(f"{path}:{lineno}: {exc}") from None
            samples.append(Sample(*vals))
    traj = Trajectory(samples=samples, psi_d=psi_d, e_psi=e_psi)
    for s in samples:
        if s.min_clearance < 0:
            traj.collided = True
            traj.collision_time = s.t
            break
    return traj


def field_grid(obstacles: Sequence[Obstacle], V: float, bounds, resolution,
               cfg: MixConfig = MixConfig(), vartheta: float = DEFAULT_VARTHETA,
               side: int = 1, t: float = 0.0) -> np.ndarray:
    """Sample the mixed field on a regular grid.

    ``bounds`` is ``(xmin, xmax, ymin, ymax)`` and ``resolution`` an int or
    an ``(nx, ny)`` pair.  Rows are ordered with x varying fastest.  Returns
    an array with columns :data:`GRID_COLUMNS`; rows inside an obstacle have
    NaN field values and ``inside = 1``.  ``w_snap`` is the index of the
    obstacle the blend snapped to, or -1.
    """
    xmin, xmax, ymin, ymax = (float(b) for b in bounds)
    nx, ny = (resolution, resolution) if np.isscalar(resolution) else resolution
    nx, ny = int(nx), int(ny)
    if nx < 2 or ny < 2:
        raise DomainError(f"resolution must be at least 2 per axis, got {nx}x{ny}")
    if not (xmax > xmin and ymax > ymin):
        raise DomainError(f"empty bounds {bounds}")
    obs = [ob.at(t) for ob in obstacles]
    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymin, ymax, ny)
    out = np.empty((nx * ny, len(GRID_COLUMNS)))
    k = 0
    for y in ys:
        for x in xs:
            inside = any(math.hypot(x - ob.center[0], y - ob.center[1]) < ob.r_o for ob in obs)
            if inside or not obs:
                hx, hy, lam_min, snap = (math.nan,) * 4 if inside else (V, 0.0, 1.0, -1)
            else:
                try:
                    f = mixed_cavf((x, y), obs, V, cfg, vartheta, side)
                    hx, hy = f.velocity
                    lam_min = f.lam
                    snap = f.weights.snapped_index if f.weights.snapped_index is not None else -1
                except DegenerateBlendError:
                    hx = hy = lam_min = math.nan
                    snap = -1
            out[k] = (x, y, hx, hy, lam_min, snap, 1.0 if inside else 0.0)
            k += 1
    return out


def field_grid_csv(grid: np.ndarray) -> str:
    buf = io.StringIO()
    buf.write(",".join(GRID_COLUMNS) + "\n")
    for row in grid:
        x, y, hx, hy, lam_min, snap, inside = row
        if inside:
            vals = [_fmt(x), _fmt(y)] + [INSIDE_SENTINEL] * 4 + ["1"]
        else:
            snap_s = "nan" if math.isnan(snap) else str(int(snap))
            vals = [_fmt(x), _fmt(y), _fmt(hx), _fmt(hy), _fmt(lam_min), snap_s, "0"]
        buf.write(",".join(vals) + "\n")
    return buf.getvalue()


def export_field_grid(obstacles: Sequence[Obstacle], V: float, cfg: MixConfig, bounds,
                      resolution, path, vartheta: float = DEFAULT_VARTHETA,
                      side: int = 1, t: float = 0.0) -> Path:
    """Write a quiver-ready grid of the mixed field to ``path``."""
    grid = field_grid(obstacles, V, bounds, resolution, cfg, vartheta, side, t)
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(field_grid_csv(grid))
    return path


def plot_run(path, obstacles: Sequence[Obstacle], trajectory: Optional[Trajectory] = None,
             V: float = 1.0, cfg: MixConfig = MixConfig(), bounds=None, resolution: int = 25,
             t: float = 0.0, title: str = "") -> Path:
    """Render trajectory, obstacle discs, influence circles and a field quiver to SVG.

    The output is byte-stable: the SVG id salt is fixed and no date is stored.
    Moving obstacles are drawn at time ``t``; their tracks over the run
    are drawn as dashed lines.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.patches import Circle

    obs_t = [ob.at(t) for ob in obstacles]
    if bounds is None:
        xs = [ob.center[0] for ob in obs_t]
        ys = [ob.center[1] for ob in obs_t]
        if trajectory is not None and len(trajectory):
            xs += list(trajectory.column("x"))
            ys += list(trajectory.column("y"))
        if not xs:
            xs, ys = [-1.0, 1.0], [-1.0, 1.0]
        pad = 1.0 + max((ob.r_o for ob in obs_t), default=0.0)
        bounds = (min(xs) - pad, max(xs) + pad, min(ys) - pad, max(ys) + pad)

    with plt.rc_context({"svg.hashsalt": "cavf", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(8, 6))
        if obs_t:
            grid = field_grid(obs_t, V, bounds, resolution, cfg)
            ok = grid[:, 6] == 0
            ax.quiver(grid[ok, 0], grid[ok, 1], grid[ok, 2], grid[ok, 3],
                      color="0.6", angles="xy", width=0.0025)
        for j, ob in enumerate(obs_t):
            ax.add_patch(Circle(ob.center, ob.r_o, color="k", alpha=0.8))
            ax.add_patch(Circle(ob.center, ob.r_i, fill=False, ls=":", color="tab:blue", lw=0.8))
            if not ob.is_static and trajectory is not None and len(trajectory):
                t_end = trajectory.samples[-1].t
                p0, p1 = obstacles[j].position(0.0), obstacles[j].position(t_end)
                ax.plot([p0[0], p1[0]], [p0[1], p1[1]], "--", color="tab:blue", lw=0.8)
        if trajectory is not None and len(trajectory):
            ax.plot(trajectory.column("x"), trajectory.column("y"), color="tab:red", lw=1.5)
        ax.set_xlim(bounds[0], bounds[1])
        ax.set_ylim(bounds[2], bounds[3])
        ax.set_aspect("equal")
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
        if title:
            ax.set_title(title)
        path = Path(path)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
