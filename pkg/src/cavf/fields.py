"""
Single-obstacle collision avoidance vector fields.

A field is built in the polar frame attached to an obstacle center: the
radial speed is scaled by the shaping function ``lam`` (0 on the obstacle
surface in front of it, 1 at the radius of influence) and the tangential
speed takes whatever is left of the constant speed budget.  For a moving
obstacle the same construction is applied to the relative velocity and the
result is mapped back to the inertial frame by adding the obstacle velocity.

All functions here are pure and operate on plain floats / small numpy
arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

DEFAULT_VARTHETA = 0.01
# relative slack below r_o still treated as the surface
SURFACE_RTOL = 1e-12


def wrap_angle(angle: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    w = math.remainder(angle, TWO_PI)
    if w <= -math.pi:
        w += TWO_PI
    return w


@dataclass(frozen=True)
class CavfParams:
    """Shaping parameters of one obstacle's field.

    ``a`` sets how abruptly the field turns tangential, ``r_i`` is the
    radius of influence and ``psi_d`` the free-stream heading.
    """

    a: float
    r_o: float
    r_i: float
    psi_d: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"shaping parameter a must be positive, got {self.a}")
        if not self.r_o > 0:
            raise DomainError(f"obstacle radius r_o must be positive, got {self.r_o}")
        if not self.r_i > self.r_o:
            raise DomainError(
                f"radius of influence r_i={self.r_i} must exceed r_o={self.r_o}"
            )


@dataclass(frozen=True)
class Obstacle:
    """Circular obstacle moving with constant velocity.

    ``center`` is the position at t = 0; use :meth:`at` to get the obstacle
    at another time.
    """

    center: tuple[float, float]
    cavf: CavfParams
    V_o: float = 0.0
    theta_o: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        if self.V_o < 0:
            raise DomainError(f"obstacle speed must be non-negative, got {self.V_o}")

    @property
    def r_o(self) -> float:
        return self.cavf.r_o

    @property
    def r_i(self) -> float:
        return self.cavf.r_i

    @property
    def is_static(self) -> bool:
        return self.V_o == 0.0

    @property
    def velocity(self) -> np.ndarray:
        return self.V_o * np.array([math.cos(self.theta_o), math.sin(self.theta_o)])

    def position(self, t: float) -> tuple[float, float]:
        if self.V_o == 0.0:
            return self.center
        return (
            self.center[0] + self.V_o * t * math.cos(self.theta_o),
            self.center[1] + self.V_o * t * math.sin(self.theta_o),
        )

    def at(self, t: float) -> "Obstacle":
        """Copy of this obstacle with its center moved to time ``t``."""
        if self.V_o == 0.0:
            return self
        return replace(self, center=self.position(t))


@dataclass(frozen=True)
class RelativeState:
    """Agent state expressed in an obstacle's polar frame.

    ``phi`` is measured from the line of sight towards the obstacle
    (``-e_r``) to the agent's velocity in that frame, so the agent heading
    in the frame is ``theta + pi + phi``.
    """

    r: float
    theta: float
    phi: float
    beta: float
    V_b: float
    psi_b: float


@dataclass
class FieldSample:
    velocity: np.ndarray
    lam: float
    gamma: float
    radial_component: float
    weights: Optional[object] = None
    components: tuple = field(default_factory=tuple)

    @property
    def heading(self) -> float:
        return math.atan2(self.velocity[1], self.velocity[0])

    @property
    def speed(self) -> float:
        return math.hypot(self.velocity[0], self.velocity[1])


def _bracket(r: float, r_o: float, r_i: float) -> float:
    return 1.0 / (r_o - r) - 1.0 / (r - r_i)


def gamma(r: float, params: CavfParams) -> float:
    """Radial shaping function, rising from 0 at ``r_o`` to 1 at ``r_i``.

    The closed form is singular at both ends of the annulus; the limits are
    returned there.
    """
    r_o, r_i, a = params.r_o, params.r_i, params.a
    if r < r_o or r > r_i:
        raise DomainError(f"gamma defined on [{r_o}, {r_i}], got r={r}")
    if r == r_o:
        return 0.0
    if r == r_i:
        return 1.0
    g = _bracket(r, r_o, r_i)
    return a * g / math.sqrt(1.0 + (2.0 * a * g) ** 2) + 0.5


def gamma_prime(r: float, params: CavfParams) -> float:
    """Derivative of :func:`gamma` with respect to ``r`` (0 at both ends)."""
    r_o, r_i, a = params.r_o, params.r_i, params.a
    if r < r_o or r > r_i:
        raise DomainError(f"gamma defined on [{r_o}, {r_i}], got r={r}")
    if r == r_o or r == r_i:
        return 0.0
    g = _bracket(r, r_o, r_i)
    dg = 1.0 / (r_o - r) ** 2 + 1.0 / (r - r_i) ** 2
    return a * dg / (1.0 + (2.0 * a * g) ** 2) ** 1.5


def _sector(theta: float, psi_d: float) -> tuple[int, float]:
    """Angular sector of ``theta - psi_d`` and its representative.

    Sector 1 is (0, pi/2], sector 2 (pi/2, 3pi/2] and sector 3 (3pi/2, 2pi]
    taken modulo 2pi.  In sector 3 the representative is shifted by -2pi so
    the affine branch joins continuously with sector 1 at zero.
    """
    d = (theta - psi_d) % TWO_PI
    if 0.0 < d <= HALF_PI:
        return 1, d
    if HALF_PI < d <= 3.0 * HALF_PI:
        return 2, d
    # d == 0 is the closed end 2pi of sector 3, whose representative is 0
    return 3, d - TWO_PI if d > 0.0 else 0.0


def lam(r: float, theta: float, params: CavfParams) -> float:
    """Shaping function scaling the radial speed of the field."""
    return lam_partials(r, theta, params)[0]


def lam_partials(r: float, theta: float, params: CavfParams) -> tuple[float, float, float]:
    """Return ``(lam, dlam/dr, dlam/dtheta)`` at ``(r, theta)``."""
    if r < params.r_o:
        raise DomainError(f"lambda defined for r >= r_o={params.r_o}, got r={r}")
    if r > params.r_i:
        return 1.0, 0.0, 0.0
    g = gamma(r, params)
    dg = gamma_prime(r, params)
    sector, d = _sector(theta, params.psi_d)
    k = 2.0 / math.pi
    if sector == 1:
        # -(2/pi) * (g*(psi_d - theta) + theta - psi_d - pi/2)
        value = -k * (-g * d + d - HALF_PI)
        return value, k * d * dg, -k * (1.0 - g)
    if sector == 2:
        return g, dg, 0.0
    value = k * (-g * d + d + HALF_PI)
    return value, -k * d * dg, k * (1.0 - g)


def lam_partials_fd(r: float, theta: float, params: CavfParams, h: float = 1e-6) -> tuple[float, float, float]:
    """Central-difference partials of :func:`lam`, one-sided near the annulus ends."""
    value = lam(r, theta, params)
    lo, hi = max(r - h, params.r_o), r + h
    if r <= params.r_i < hi:
        hi = params.r_i
    dr = (lam(hi, theta, params) - lam(lo, theta, params)) / (hi - lo) if hi > lo else 0.0
    dth = (lam(r, theta + h, params) - lam(r, theta - h, params)) / (2.0 * h)
    return value, dr, dth


def switching_sign(sin_beta: float, vartheta: float = DEFAULT_VARTHETA, side: int = 1) -> float:
    """``sign(sin beta)`` with a fixed side inside the switching band."""
    if abs(sin_beta) < math.sin(vartheta):
        return 1.0 if side >= 0 else -1.0
    return 1.0 if sin_beta > 0 else -1.0


def relative_polar(r: float, theta: float, params: CavfParams, speed: float,
                   vartheta: float = DEFAULT_VARTHETA, side: int = 1):
    """Polar components ``(rdot, r*thetadot)`` of the field plus ``lam``, ``gamma``.

    ``params.psi_d`` is the free-stream heading of the frame the field is
    built in (the relative heading for a moving obstacle).
    """
    if r > params.r_i:
        lam_v, gam = 1.0, 1.0
    else:
        lam_v, gam = lam(r, theta, params), gamma(r, params)
    beta = math.pi - (theta - params.psi_d)
    rdot = -lam_v * speed * math.cos(beta)
    s = switching_sign(math.sin(beta), vartheta, side)
    rthetadot = -s * math.sqrt(max(speed * speed - rdot * rdot, 0.0))
    return rdot, rthetadot, lam_v, gam


def _polar_to_inertial(rdot: float, rthetadot: float, theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([c * rdot - s * rthetadot, s * rdot + c * rthetadot])


def snap_to_surface(r: float, r_o: float) -> float:
    """Map radii within rounding error below ``r_o`` onto the surface."""
    if r_o * (1.0 - SURFACE_RTOL) <= r < r_o:
        return r_o
    return r


def _locate(p, obstacle: Obstacle) -> tuple[float, float]:
    dx = float(p[0]) - obstacle.center[0]
    dy = float(p[1]) - obstacle.center[1]
    r = snap_to_surface(math.hypot(dx, dy), obstacle.r_o)
    if r < obstacle.r_o:
        raise DomainError(
            f"point ({p[0]}, {p[1]}) is inside the obstacle at {obstacle.center} (r={r} < r_o={obstacle.r_o})"
        )
    return r, math.atan2(dy, dx)


def _free_stream(V: float, psi_d: float, theta: float) -> FieldSample:
    v = V * np.array([math.cos(psi_d), math.sin(psi_d)])
    return FieldSample(v, 1.0, 1.0, V * math.cos(psi_d - theta))


def cavf_static(p, obstacle: Obstacle, V: float,
                vartheta: float = DEFAULT_VARTHETA, side: int = 1) -> FieldSample:
    """Field of a static obstacle at point ``p``, in inertial coordinates."""
    if obstacle.V_o != 0.0:
        raise DomainError("cavf_static needs a static obstacle; use cavf_moving")
    if not V > 0:
        raise DomainError(f"agent speed must be positive, got {V}")
    r, theta = _locate(p, obstacle)
    params = obstacle.cavf
    if r > params.r_i:
        return _free_stream(V, params.psi_d, theta)
    rdot, rthetadot, lam_v, gam = relative_polar(r, theta, params, V, vartheta, side)
    return FieldSample(_polar_to_inertial(rdot, rthetadot, theta), lam_v, gam, rdot)


def solve_relative_speed(V: float, V_o: float, chi: float) -> float:
    """Speed in the obstacle frame that gives inertial speed ``V``.

    ``chi = phi + theta - theta_o`` is the angle between the obstacle
    velocity and the reversed relative velocity; the positive root of
    ``V_b**2 - 2 V_b V_o cos(chi) + V_o**2 = V**2`` is returned.
    """
    if not V > V_o:
        raise DomainError(f"agent speed V={V} must exceed obstacle speed V_o={V_o}")
    s = math.sin(chi)
    return V_o * math.cos(chi) + math.sqrt(V * V - V_o * V_o * s * s)


def relative_heading(V: float, psi_d: float, V_o: float, theta_o: float) -> float:
    """Free-stream heading seen from the moving obstacle frame."""
    return math.atan2(V * math.sin(psi_d) - V_o * math.sin(theta_o),
                      V * math.cos(psi_d) - V_o * math.cos(theta_o))


def cavf_moving(p, obstacle: Obstacle, V: float,
                vartheta: float = DEFAULT_VARTHETA, side: int = 1) -> FieldSample:
    """Field of a moving obstacle at point ``p`` (obstacle at its current center)."""
    if not V > obstacle.V_o:
        raise DomainError(f"agent speed V={V} must exceed obstacle speed V_o={obstacle.V_o}")
    if obstacle.V_o == 0.0:
        return cavf_static(p, obstacle, V, vartheta, side)
    r, theta = _locate(p, obstacle)
    params = obstacle.cavf
    if r > params.r_i:
        return _free_stream(V, params.psi_d, theta)
    psi_b = relative_heading(V, params.psi_d, obstacle.V_o, obstacle.theta_o)
    rel = replace(params, psi_d=psi_b)
    rdot1, rthetadot1, lam_v, gam = relative_polar(r, theta, rel, 1.0, vartheta, side)
    direction = _polar_to_inertial(rdot1, rthetadot1, theta)
    phi = math.atan2(direction[1], direction[0]) - theta - math.pi
    V_b = solve_relative_speed(V, obstacle.V_o, phi + theta - obstacle.theta_o)
    v = V_b * direction + obstacle.velocity
    radial = v[0] * math.cos(theta) + v[1] * math.sin(theta)
    return FieldSample(v, lam_v, gam, radial)


def cavf(p, obstacle: Obstacle, V: float,
         vartheta: float = DEFAULT_VARTHETA, side: int = 1) -> FieldSample:
    """Dispatch to the static or moving field."""
    if obstacle.V_o == 0.0:
        return cavf_static(p, obstacle, V, vartheta, side)
    return cavf_moving(p, obstacle, V, vartheta, side)


def relative_state(p, psi: float, obstacle: Obstacle, V: float) -> RelativeState:
    """Polar-frame state of an agent at ``p`` with heading ``psi``.

    For a moving obstacle, ``phi`` and ``V_b`` describe the velocity relative
    to the obstacle.
    """
    dx = float(p[0]) - obstacle.center[0]
    dy = float(p[1]) - obstacle.center[1]
    r = snap_to_surface(math.hypot(dx, dy), obstacle.r_o)
    theta = math.atan2(dy, dx)
    psi_d = obstacle.cavf.psi_d
    if obstacle.V_o == 0.0:
        V_b, psi_b, alpha = V, psi_d, psi
    else:
        vx = V * math.cos(psi) - obstacle.V_o * math.cos(obstacle.theta_o)
        vy = V * math.sin(psi) - obstacle.V_o * math.sin(obstacle.theta_o)
        V_b = math.hypot(vx, vy)
        alpha = math.atan2(vy, vx)
        psi_b = relative_heading(V, psi_d, obstacle.V_o, obstacle.theta_o)
    return RelativeState(
        r=r,
        theta=theta,
        phi=wrap_angle(alpha - theta - math.pi),
        beta=wrap_angle(math.pi - (theta - psi_b)),
        V_b=V_b,
        psi_b=psi_b,
    )
