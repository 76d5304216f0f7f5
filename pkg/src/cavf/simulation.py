"""
Fixed-step closed-loop simulation of a constant-speed planar vehicle.

The vehicle state is ``(x, y, psi)`` with ``x' = V cos psi``,
``y' = V sin psi``, ``psi' = u``.  Obstacles are registered once they enter
the sensing disc and stay registered afterwards.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .control import (
    ControlConfig,
    ControlOutput,
    control_mixed,
    control_single,
    control_tracking,
    gain_for,
)
from .errors import DomainError, ScenarioError, SingularityError
from .fields import Obstacle, wrap_angle
from .mixing import MixConfig

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AgentState:
    x: float
    y: float
    psi: float
    V: float = 1.0
    psi_d: float = 0.0
    r_s: float = math.inf

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.01
    t_final: float = 20.0
    tie_break_side: int = 1
    random_seed: int = 0

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if not self.t_final > 0:
            raise DomainError(f"t_final must be positive, got {self.t_final}")
        if self.tie_break_side not in (1, -1):
            raise DomainError(f"tie_break_side must be +1 or -1, got {self.tie_break_side}")

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.t_final / self.dt + 1e-9))


Control = Union[float, Callable[[float, AgentState], float]]


def _deriv(V, psi, u):
    return V * math.cos(psi), V * math.sin(psi), u


def step(agent: AgentState, u: Control, dt: float, t: float = 0.0) -> AgentState:
    """Advance the vehicle by ``dt`` with classical fourth-order Runge-Kutta.

    A float ``u`` is held over the whole step.  A callable ``u(t, state)`` is
    re-evaluated at every stage, which integrates the closed loop itself.
    """
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    V = agent.V
    if callable(u):
        rate = lambda tt, x, y, psi: u(tt, replace(agent, x=x, y=y, psi=psi))
    else:
        rate = lambda tt, x, y, psi: u

    x0, y0, p0 = agent.x, agent.y, agent.psi
    h = 0.5 * dt
    k1 = _deriv(V, p0, rate(t, x0, y0, p0))
    k2 = _deriv(V, p0 + h * k1[2], rate(t + h, x0 + h * k1[0], y0 + h * k1[1], p0 + h * k1[2]))
    k3 = _deriv(V, p0 + h * k2[2], rate(t + h, x0 + h * k2[0], y0 + h * k2[1], p0 + h * k2[2]))
    k4 = _deriv(V, p0 + dt * k3[2], rate(t + dt, x0 + dt * k3[0], y0 + dt * k3[1], p0 + dt * k3[2]))
    c = dt / 6.0
    return replace(
        agent,
        x=x0 + c * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
        y=y0 + c * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
        psi=wrap_angle(p0 + c * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])),
    )


def check_separation(obstacles: Sequence[Obstacle], indices, delta: float, t: float = 0.0):
    """Raise :class:`ScenarioError` if two listed obstacles are closer than ``delta``."""
    idx = sorted(indices)
    for a_pos, j in enumerate(idx):
        pj = obstacles[j].position(t)
        for k in idx[a_pos + 1:]:
            pk = obstacles[k].position(t)
            gap = math.hypot(pj[0] - pk[0], pj[1] - pk[1]) - obstacles[j].r_o - obstacles[k].r_o
            if gap < delta - 1e-9:
                raise ScenarioError(
                    f"obstacles {j} and {k} are {gap:.6g} m apart at t={t:g}, "
                    f"below the minimum separation {delta:g} m"
                )


@dataclass(frozen=True)
class WorldState:
    """Obstacles (positions given at t = 0), registered index set and time."""

    obstacles: tuple[Obstacle, ...]
    registered: frozenset = frozenset()
    t: float = 0.0

    def current(self) -> list[Obstacle]:
        return [ob.at(self.t) for ob in self.obstacles]

    def registered_obstacles(self) -> list[Obstacle]:
        return [self.obstacles[j].at(self.t) for j in sorted(self.registered)]


def sense_and_register(agent: AgentState, world: WorldState,
                       min_separation: Optional[float] = None) -> WorldState:
    """Register every obstacle whose center lies in the closed sensing disc."""
    new = set()
    for j, ob in enumerate(world.obstacles):
        if j in world.registered:
            continue
        c = ob.position(world.t)
        if math.hypot(agent.x - c[0], agent.y - c[1]) <= agent.r_s:
            if not agent.V > ob.V_o:
                raise ScenarioError(
                    f"obstacle {j} speed {ob.V_o} is not below the agent speed {agent.V}"
                )
            new.add(j)
    if not new:
        return world
    registered = world.registered | new
    if min_separation is not None:
        check_separation(world.obstacles, registered, min_separation, world.t)
    return replace(world, registered=frozenset(registered))


@dataclass(frozen=True)
class Sample:
    t: float
    x: float
    y: float
    psi: float
    u: float
    min_clearance: float
    active_obstacles: tuple[int, ...] = ()
    psi_ca: float = math.nan
    K: float = math.nan


@dataclass
class Trajectory:
    samples: list[Sample] = field(default_factory=list)
    psi_d: float = 0.0
    e_psi: float = 0.01
    collided: bool = False
    collision_time: Optional[float] = None
    registration_times: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.samples)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples], dtype=float)


@dataclass(frozen=True)
class CollisionReport:
    min_clearance: float
    first_violation_time: Optional[float]
    heading_error: float
    heading_ok: bool

    @property
    def collided(self) -> bool:
        return self.first_violation_time is not None


def check_collision(trajectory: Trajectory, psi_d: Optional[float] = None,
                    e_psi: Optional[float] = None) -> CollisionReport:
    """Clearance, first violation time and final heading error of a run."""
    psi_d = trajectory.psi_d if psi_d is None else psi_d
    e_psi = trajectory.e_psi if e_psi is None else e_psi
    clearance = math.inf
    first = None
    for s in trajectory.samples:
        clearance = min(clearance, s.min_clearance)
        if first is None and s.min_clearance < 0:
            first = s.t
    err = abs(wrap_angle(trajectory.samples[-1].psi - psi_d)) if trajectory.samples else math.nan
    return CollisionReport(clearance, first, err, err <= e_psi)


def _clearances(agent: AgentState, obstacles: Sequence[Obstacle]):
    return [math.hypot(agent.x - ob.center[0], agent.y - ob.center[1]) - ob.r_o for ob in obstacles]


class Controller:
    """Maps ``(t, agent)`` to a steering rate for one scenario."""

    def __init__(self, obstacles: Sequence[Obstacle], control: ControlConfig,
                 mix: MixConfig, side: int = 1):
        self.obstacles = tuple(obstacles)
        self.control = control
        self.mix = mix
        self.side = side

    def evaluate(self, t: float, agent: AgentState, registered) -> tuple[ControlOutput, float, float]:
        """Return the control output, the mixed heading and the gain used."""
        cfg = self.control
        obs = [self.obstacles[j].at(t) for j in sorted(registered)]
        if cfg.mode == "none":
            return ControlOutput(0.0, "open_loop"), math.nan, 0.0
        if not obs:
            out = control_tracking(agent, agent.psi_d, 0.0, gain_for(cfg, agent.V, math.inf))
            return out, agent.psi_d, out.diagnostics["K"]
        if cfg.mode == "exact" and len(obs) == 1:
            ob = obs[0]
            r = math.hypot(agent.x - ob.center[0], agent.y - ob.center[1])
            if r <= ob.r_i:
                return control_single(agent.position, agent.psi, ob, agent.V, cfg, self.side), math.nan, 0.0
            return ControlOutput(0.0, "free_stream"), agent.psi_d, 0.0
        mixed = control_mixed(agent, obs, cfg, self.mix, self.side)
        psi_ca = mixed.diagnostics["psi_ca"]
        K = gain_for(cfg, agent.V, min(_clearances(agent, obs)))
        out = control_tracking(agent, psi_ca, mixed.u, K)
        out.diagnostics.update(mixed.diagnostics)
        return out, psi_ca, K


def run(scenario) -> Trajectory:
    """Simulate a scenario from t = 0 to ``sim.t_final``.

    The steering rate is computed at the start of each step and held over the
    step.  The run stops early at the first sample with negative clearance;
    the trajectory is still returned with ``collided`` set.
    """
    sim: SimConfig = scenario.sim
    agent: AgentState = scenario.agent
    cfg: ControlConfig = scenario.control
    controller = Controller(scenario.obstacles, cfg, scenario.mix, sim.tie_break_side)
    world = WorldState(tuple(scenario.obstacles))
    traj = Trajectory(psi_d=agent.psi_d, e_psi=cfg.e_psi)

    for k in range(sim.n_steps + 1):
        t = k * sim.dt
        world = replace(world, t=t)
        before = world.registered
        world = sense_and_register(agent, world, scenario.mix.min_separation)
        for j in sorted(world.registered - before):
            traj.registration_times[j] = t
        obs = world.registered_obstacles()
        clear = _clearances(agent, obs)
        min_clear = min(clear) if clear else math.inf
        if min_clear < 0:
            traj.samples.append(Sample(t, agent.x, agent.y, agent.psi, math.nan, min_clear))
            traj.collided = True
            traj.collision_time = t
            log.warning("collision at t=%.4f s (clearance %.3g m)", t, min_clear)
            break
        try:
            out, psi_ca, K = controller.evaluate(t, agent, world.registered)
        except SingularityError:
            log.error("singular moving-frame configuration at t=%.4f", t)
            raise
        active = tuple(
            j for j, ob in zip(sorted(world.registered), obs)
            if math.hypot(agent.x - ob.center[0], agent.y - ob.center[1]) < ob.r_i
        )
        traj.samples.append(Sample(t, agent.x, agent.y, agent.psi, out.u, min_clear, active, psi_ca, K))
        if k == sim.n_steps:
            break
        agent = step(agent, out.u, sim.dt, t)
    return traj


def closed_loop(agent: AgentState, law: Callable[[float, AgentState], float],
                dt: float, t_final: float, stop: Optional[Callable[[float, AgentState], bool]] = None):
    """Integrate ``law`` evaluated at every Runge-Kutta stage.

    Returns the list of ``(t, agent)`` pairs, ending early when ``stop`` is
    true.
    """
    out = [(0.0, agent)]
    n = int(math.floor(t_final / dt + 1e-9))
    for k in range(n):
        t = k * dt
        agent = step(agent, law, dt, t)
        out.append(((k + 1) * dt, agent))
        if stop is not None and stop((k + 1) * dt, agent):
            break
    return out
