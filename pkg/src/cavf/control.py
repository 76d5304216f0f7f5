"""
Steering-rate laws that follow the avoidance fields.

``control_static`` and ``control_dynamic`` are the exact streamline-following
laws for one obstacle; ``control_mixed`` blends per-obstacle heading rates
with the heading-rate weights, and ``control_tracking`` wraps it in a
proportional heading loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .errors import DegenerateBlendError, DomainError, SingularityError
from .fields import (
    DEFAULT_VARTHETA,
    CavfParams,
    Obstacle,
    RelativeState,
    cavf,
    lam_partials,
    lam_partials_fd,
    relative_heading,
    relative_polar,
    relative_state,
    snap_to_surface,
    solve_relative_speed,
    wrap_angle,
)
from .mixing import MixConfig, heading_rate_weights, mixed_cavf, nearest_index

GAIN_MODES = ("fixed", "separation", "adaptive")
CONTROL_MODES = ("tracking", "exact", "none")
SINGULAR_TOL = 1e-9


@dataclass(frozen=True)
class ControlConfig:
    """Controller settings.

    ``gain_mode`` selects how the tracking gain is obtained: ``"fixed"``
    uses ``K``, ``"separation"`` derives it from ``delta`` and ``e_psi``,
    ``"adaptive"`` uses ``c_num / delta(t)`` with ``delta(t)`` the current
    smallest surface clearance.
    """

    vartheta: float = DEFAULT_VARTHETA
    e_psi: float = 0.01
    gain_mode: str = "fixed"
    K: Optional[float] = 25.0
    delta: Optional[float] = None
    c_num: Optional[float] = None
    mode: str = "tracking"
    derivatives: str = "analytic"

    def __post_init__(self):
        if not 0.0 < self.vartheta < 0.5 * math.pi:
            raise DomainError(f"vartheta must lie in (0, pi/2), got {self.vartheta}")
        if not 0.0 < self.e_psi < math.pi:
            raise DomainError(f"e_psi must lie in (0, pi), got {self.e_psi}")
        if self.gain_mode not in GAIN_MODES:
            raise DomainError(f"gain_mode must be one of {GAIN_MODES}, got {self.gain_mode!r}")
        if self.mode not in CONTROL_MODES:
            raise DomainError(f"mode must be one of {CONTROL_MODES}, got {self.mode!r}")
        if self.derivatives not in ("analytic", "fd"):
            raise DomainError(f"derivatives must be 'analytic' or 'fd', got {self.derivatives!r}")
        needed = {"fixed": "K", "separation": "delta", "adaptive": "c_num"}[self.gain_mode]
        value = getattr(self, needed)
        if value is None or not value > 0:
            raise DomainError(f"gain_mode {self.gain_mode!r} needs a positive {needed}, got {value}")

    @property
    def k_vartheta(self) -> float:
        return 1.0 / math.sin(self.vartheta)


@dataclass
class ControlOutput:
    u: float
    branch: str = "regular"
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TrackingState:
    psi_ca: float
    e: float
    c: float
    t_track: float


def _partials(r, theta, params: CavfParams, cfg: ControlConfig):
    if cfg.derivatives == "fd":
        return lam_partials_fd(r, theta, params)
    return lam_partials(r, theta, params)


def _phi_rate(r, theta, rdot, thetadot, sin_phi, params: CavfParams, cfg: ControlConfig, side: int):
    """Rate of the line-of-sight/velocity angle that keeps the agent on the field.

    ``params.psi_d`` is the reference heading of the frame; ``sin_phi`` the
    denominator, replaced by ``sin(vartheta)`` near the switching line.
    """
    lam_v, lam_r, lam_th = _partials(r, theta, params, cfg)
    dlam = lam_r * rdot + lam_th * thetadot
    ref = theta - params.psi_d
    numer = dlam * math.cos(ref) - lam_v * thetadot * math.sin(ref)
    if abs(sin_phi) < math.sin(cfg.vartheta):
        k = cfg.k_vartheta if side >= 0 else -cfg.k_vartheta
        return k * numer, "switching_correction", lam_v, dlam
    return numer / sin_phi, "regular", lam_v, dlam


def _check_annulus(r, params: CavfParams):
    # beyond r_i the law is still defined: lambda = 1 and the free stream gives u = 0
    if r < params.r_o:
        raise DomainError(f"control law defined for r >= r_o = {params.r_o}, got r={r}")


def control_static(state: RelativeState, params: CavfParams, V: float,
                   cfg: ControlConfig = ControlConfig(), side: int = 1) -> ControlOutput:
    """Steering rate that keeps the agent on a static obstacle's streamline."""
    _check_annulus(state.r, params)
    rdot = -V * math.cos(state.phi)
    thetadot = -V * math.sin(state.phi) / state.r
    u_s, branch, lam_v, dlam = _phi_rate(
        state.r, state.theta, rdot, thetadot, math.sin(state.phi), params, cfg, side
    )
    return ControlOutput(
        u=u_s + thetadot,
        branch=branch,
        diagnostics={"lam": lam_v, "lam_dot": dlam, "phi": state.phi, "theta_dot": thetadot,
                     "u_s": u_s, "V_b": V, "V_b_dot": 0.0},
    )


def _inertial_rate(alpha_dot, phi, theta, V_b, V, V_o, theta_o):
    """Inertial heading rate from the relative-frame direction rate."""
    chi = phi + theta - theta_o
    vx = -V_b * math.cos(phi + theta) + V_o * math.cos(theta_o)
    vy = -V_b * math.sin(phi + theta) + V_o * math.sin(theta_o)
    psi = math.atan2(vy, vx)
    denom = 1.0 + (V_o * V_o / (V * V_b)) * math.sin(chi) * math.sin(psi - theta_o)
    if abs(denom) < SINGULAR_TOL:
        raise SingularityError("moving-frame speed rate is singular (V close to V_o)")
    V_b_dot = alpha_dot * (V_o / V) * (V_b - V_o * math.cos(chi)) * math.sin(psi - theta_o) / denom
    u = (alpha_dot * (V_b * V_b - V_b * V_o * math.cos(chi)) - V_b_dot * V_o * math.sin(chi)) / (V * V)
    return u, V_b_dot


def control_dynamic(state: RelativeState, obstacle: Obstacle, V: float,
                    cfg: ControlConfig = ControlConfig(), side: int = 1) -> ControlOutput:
    """Steering rate that keeps the agent on a moving obstacle's streamline.

    ``state.phi`` and ``state.V_b`` describe the velocity relative to the
    obstacle.
    """
    V_o, theta_o = obstacle.V_o, obstacle.theta_o
    if not V > V_o:
        raise DomainError(f"agent speed V={V} must exceed obstacle speed V_o={V_o}")
    params = obstacle.cavf
    _check_annulus(state.r, params)
    psi_b = relative_heading(V, params.psi_d, V_o, theta_o)
    rel = replace(params, psi_d=psi_b)
    rdot = -state.V_b * math.cos(state.phi)
    thetadot = -state.V_b * math.sin(state.phi) / state.r
    u_d, branch, lam_v, dlam = _phi_rate(
        state.r, state.theta, rdot, thetadot, math.sin(state.phi), rel, cfg, side
    )
    u, V_b_dot = _inertial_rate(u_d + thetadot, state.phi, state.theta, state.V_b, V, V_o, theta_o)
    return ControlOutput(
        u=u,
        branch=branch,
        diagnostics={"lam": lam_v, "lam_dot": dlam, "phi": state.phi, "theta_dot": thetadot,
                     "u_d": u_d, "V_b": state.V_b, "V_b_dot": V_b_dot},
    )


def control_single(p, psi: float, obstacle: Obstacle, V: float,
                   cfg: ControlConfig = ControlConfig(), side: int = 1) -> ControlOutput:
    """Exact single-obstacle law for an agent at ``p`` with heading ``psi``."""
    state = relative_state(p, psi, obstacle, V)
    if obstacle.V_o == 0.0:
        return control_static(state, obstacle.cavf, V, cfg, side)
    return control_dynamic(state, obstacle, V, cfg, side)


def field_heading_rate(p, velocity, obstacle: Obstacle, V: float,
                       cfg: ControlConfig = ControlConfig(), side: int = 1) -> float:
    """Rate of change of one obstacle's field heading seen by an agent moving with ``velocity``.

    The field's own line-of-sight angle at ``p`` is used in the law, while the
    radial and angular rates come from the agent's actual motion relative to
    the obstacle.  When the agent sits on the obstacle's streamline this is
    the exact single-obstacle command; outside the annulus it is zero.
    """
    dx, dy = p[0] - obstacle.center[0], p[1] - obstacle.center[1]
    params = obstacle.cavf
    r = snap_to_surface(math.hypot(dx, dy), params.r_o)
    if r >= params.r_i:
        return 0.0
    _check_annulus(r, params)
    theta = math.atan2(dy, dx)
    V_o, theta_o = obstacle.V_o, obstacle.theta_o
    vx = velocity[0] - V_o * math.cos(theta_o)
    vy = velocity[1] - V_o * math.sin(theta_o)
    ct, st = math.cos(theta), math.sin(theta)
    rdot = vx * ct + vy * st
    thetadot = (-vx * st + vy * ct) / r
    ref = params if V_o == 0.0 else replace(params, psi_d=relative_heading(V, params.psi_d, V_o, theta_o))
    fr, frt, _, _ = relative_polar(r, theta, ref, 1.0, cfg.vartheta, side)
    # field direction in the obstacle frame as a line-of-sight angle
    phi_f = math.atan2(-frt, -fr)
    rate, _, _, _ = _phi_rate(r, theta, rdot, thetadot, math.sin(phi_f), ref, cfg, side)
    alpha_dot = rate + thetadot
    if V_o == 0.0:
        return alpha_dot
    V_b = solve_relative_speed(V, V_o, phi_f + theta - theta_o)
    u, _ = _inertial_rate(alpha_dot, phi_f, theta, V_b, V, V_o, theta_o)
    return u


def control_mixed(agent, obstacles: Sequence[Obstacle], cfg: ControlConfig = ControlConfig(),
                  mix: MixConfig = MixConfig(), side: int = 1) -> ControlOutput:
    """Blended steering rate for several obstacles.

    ``agent`` needs ``x``, ``y``, ``psi`` and ``V``; obstacles must already be
    at their current positions.  The mixed field heading is reported as
    ``diagnostics["psi_ca"]``.  If the blend is degenerate the nearest
    obstacle's field and rate are used.
    """
    if not obstacles:
        raise DomainError("control_mixed needs at least one obstacle")
    p = (agent.x, agent.y)
    V = agent.V
    velocity = (V * math.cos(agent.psi), V * math.sin(agent.psi))
    try:
        sample = mixed_cavf(p, obstacles, V, mix, cfg.vartheta, side)
        headings = [c.heading for c in sample.components]
        W = heading_rate_weights(sample.weights, headings)
    except DegenerateBlendError:
        k = nearest_index(p, obstacles)
        comp = cavf(p, obstacles[k], V, cfg.vartheta, side)
        u_k = field_heading_rate(p, velocity, obstacles[k], V, cfg, side)
        return ControlOutput(
            u=u_k, branch="degenerate_fallback",
            diagnostics={"psi_ca": comp.heading, "W": None, "u_j": None, "fallback_index": k},
        )
    u_j = [
        field_heading_rate(p, velocity, ob, V, cfg, side) if Wj != 0.0 else 0.0
        for ob, Wj in zip(obstacles, W)
    ]
    u_m = sum(Wj * uj for Wj, uj in zip(W, u_j))
    return ControlOutput(
        u=u_m,
        branch="regular",
        diagnostics={"psi_ca": sample.heading, "W": W, "u_j": u_j, "weights": sample.weights,
                     "lam_min": sample.lam},
    )


def control_tracking(agent, psi_ca: float, u_m: float, K: float) -> ControlOutput:
    """Proportional heading loop around the mixed field heading."""
    e = wrap_angle(agent.psi - psi_ca)
    return ControlOutput(u=-K * e + u_m, branch="regular", diagnostics={"e": e, "K": K})


def tracking_gain(V: float, e_psi: float, delta: float) -> float:
    """Gain that brings any heading error below ``e_psi`` within half of ``delta``."""
    if not V > 0:
        raise DomainError(f"V must be positive, got {V}")
    if not 0.0 < e_psi < math.pi:
        raise DomainError(f"e_psi must lie in (0, pi), got {e_psi}")
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    return 2.0 * V * (math.log(math.pi) - math.log(e_psi)) / delta


def gain_for(cfg: ControlConfig, V: float, clearance: float) -> float:
    """Tracking gain of the configured mode; ``clearance`` feeds the adaptive mode."""
    if cfg.gain_mode == "fixed":
        return cfg.K
    if cfg.gain_mode == "separation":
        return tracking_gain(V, cfg.e_psi, cfg.delta)
    if not math.isfinite(clearance):
        return 0.0
    return cfg.c_num / max(abs(clearance), 1e-9)


def tracking_state(psi: float, psi_ca: float, K: float, V: float, delta: float) -> TrackingState:
    e = wrap_angle(psi - psi_ca)
    return TrackingState(psi_ca=psi_ca, e=e, c=e, t_track=delta / (2.0 * V))
