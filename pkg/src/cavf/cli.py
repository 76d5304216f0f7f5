"""Command-line entry points: simulate, field, check, plot, generate.

Exit codes: 0 success, 1 usage or validation error, 2 collision detected.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .errors import CavfError
from .export import (
    export_field_grid,
    export_trajectory,
    field_grid,
    field_grid_csv,
    plot_run,
    read_trajectory,
)
from .fields import CavfParams, Obstacle
from .control import GAIN_MODES
from .mixing import MixConfig
from .scenario import Scenario, generate_scenario, load_scenario, save_scenario
from .simulation import check_collision, run

EXIT_OK, EXIT_ERROR, EXIT_COLLISION = 0, 1, 2

# gain values used when --gain-mode switches to a mode the file does not configure
DEFAULT_K = 25.0
DEFAULT_C_NUM = 11.5

log = logging.getLogger("cavf")


def _err(msg: str):
    print(f"cavf: {msg}", file=sys.stderr)


def _apply_overrides(sc: Scenario, args) -> Scenario:
    sim, control = sc.sim, sc.control
    if getattr(args, "dt", None) is not None:
        sim = replace(sim, dt=args.dt)
    if getattr(args, "t_final", None) is not None:
        sim = replace(sim, t_final=args.t_final)
    if getattr(args, "tie_break", None) is not None:
        sim = replace(sim, tie_break_side=1 if args.tie_break == "left" else -1)
    mode = getattr(args, "gain_mode", None)
    if mode is not None and mode != control.gain_mode:
        if mode == "fixed":
            control = replace(control, gain_mode=mode, K=control.K or DEFAULT_K)
        elif mode == "separation":
            control = replace(control, gain_mode=mode, delta=control.delta or sc.mix.min_separation)
        else:
            control = replace(control, gain_mode=mode, c_num=control.c_num or DEFAULT_C_NUM)
    return replace(sc, sim=sim, control=control)


def _report(name: str, traj, rep) -> int:
    print(f"{name}: {len(traj)} samples, min_clearance={rep.min_clearance:.6g} m, "
          f"heading_error={rep.heading_error:.3g} rad")
    if rep.collided:
        _err(f"{name}: collision at t={rep.first_violation_time:g} s")
        return EXIT_COLLISION
    if not rep.heading_ok:
        _err(f"{name}: final heading error {rep.heading_error:.3g} exceeds e_psi={traj.e_psi:g}")
        return EXIT_ERROR
    return EXIT_OK


def cmd_simulate(args) -> int:
    sc = _apply_overrides(load_scenario(args.scenario), args)
    traj = run(sc)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = export_trajectory(traj, out / f"{sc.name}_trajectory.csv")
    print(f"wrote {path}")
    return _report(sc.name, traj, check_collision(traj))


def _default_field_obstacles():
    return [Obstacle((0.0, 0.0), CavfParams(1.0, 1.0, 3.0, 0.0))]


def cmd_field(args) -> int:
    if args.scenario:
        sc = load_scenario(args.scenario)
        obstacles, V, mix = sc.obstacles, sc.agent.V, sc.mix
        vartheta = sc.control.vartheta
    else:
        obstacles, V, mix, vartheta = _default_field_obstacles(), 1.0, MixConfig(), 0.01
    kw = dict(vartheta=vartheta, side=1 if args.tie_break != "right" else -1, t=args.time)
    res = tuple(args.res) if len(args.res) == 2 else args.res[0]
    if args.out:
        path = export_field_grid(obstacles, V, mix, args.bounds, res, args.out, **kw)
        print(f"wrote {path}")
    else:
        sys.stdout.write(field_grid_csv(field_grid(obstacles, V, args.bounds, res, mix, **kw)))
    return EXIT_OK


def cmd_check(args) -> int:
    target = args.target
    if target.endswith(".json") or Path(target).suffix == "" and not Path(target).exists():
        sc = load_scenario(target)
        print(f"{sc.name}: valid scenario, {len(sc.obstacles)} obstacles")
        return EXIT_OK
    psi_d, e_psi = args.psi_d, args.e_psi
    if args.scenario:
        sc = load_scenario(args.scenario)
        psi_d = sc.agent.psi_d if psi_d is None else psi_d
        e_psi = sc.control.e_psi if e_psi is None else e_psi
    psi_d = 0.0 if psi_d is None else psi_d
    e_psi = 0.01 if e_psi is None else e_psi
    traj = read_trajectory(target, psi_d, e_psi)
    if not len(traj):
        _err(f"{target}: no samples")
        return EXIT_ERROR
    return _report(target, traj, check_collision(traj))


def cmd_plot(args) -> int:
    sc = _apply_overrides(load_scenario(args.scenario), args)
    if args.trajectory:
        traj = read_trajectory(args.trajectory, sc.agent.psi_d, sc.control.e_psi)
    else:
        traj = run(sc)
    out = Path(args.out) if args.out else Path(f"{sc.name}.svg")
    path = plot_run(out, sc.obstacles, traj, sc.agent.V, sc.mix, resolution=args.res, title=sc.name)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for k in range(args.count):
        seed = args.seed + k
        sc = generate_scenario(seed, args.n_obstacles, t_final=args.t_final or 24.0)
        path = save_scenario(sc, out / f"{sc.name}.json")
        print(f"wrote {path}")
    return EXIT_OK


def _add_overrides(p):
    p.add_argument("--dt", type=float, help="integration step [s]")
    p.add_argument("--t-final", type=float, help="simulated horizon [s]")
    p.add_argument("--tie-break", choices=("left", "right"), help="avoidance side on the switching line")
    p.add_argument("--gain-mode", choices=GAIN_MODES, help="tracking gain rule")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cavf", description="Collision avoidance vector field simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario and export its trajectory")
    p.add_argument("scenario", help="scenario file or bundled scenario name")
    p.add_argument("--out", default=".", help="output directory")
    _add_overrides(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("field", help="sample the mixed field on a grid")
    p.add_argument("--scenario", help="take obstacles from a scenario (default: one static obstacle)")
    p.add_argument("--bounds", type=float, nargs=4, default=(-4.0, 4.0, -4.0, 4.0),
                   metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    p.add_argument("--res", type=int, nargs="+", default=[40], help="points per axis (one or two values)")
    p.add_argument("--time", type=float, default=0.0, help="time at which movers are placed [s]")
    p.add_argument("--tie-break", choices=("left", "right"), default="left")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("check", help="validate a scenario or check a trajectory file")
    p.add_argument("target", help="scenario (.json or bundled name) or trajectory CSV")
    p.add_argument("--scenario", help="scenario providing psi_d and e_psi for a trajectory")
    p.add_argument("--psi-d", type=float)
    p.add_argument("--e-psi", type=float)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("plot", help="render trajectory and field to SVG")
    p.add_argument("scenario")
    p.add_argument("--trajectory", help="trajectory CSV (default: simulate the scenario)")
    p.add_argument("--out", help="SVG path (default: <name>.svg)")
    p.add_argument("--res", type=int, default=25, help="quiver points per axis")
    _add_overrides(p)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("generate", help="write random clutter scenarios")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--n-obstacles", type=int, default=8)
    p.add_argument("--t-final", type=float)
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "field" and len(args.res) not in (1, 2):
        _err("--res takes one or two values")
        return EXIT_ERROR
    try:
        return args.func(args)
    except CavfError as exc:
        _err(str(exc))
        return EXIT_ERROR
    except OSError as exc:
        _err(str(exc))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
