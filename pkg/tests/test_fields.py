import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavf.errors import DomainError
from cavf.fields import (
    CavfParams,
    Obstacle,
    cavf,
    cavf_moving,
    cavf_static,
    gamma,
    gamma_prime,
    lam,
    lam_partials,
    lam_partials_fd,
    relative_heading,
    relative_state,
    solve_relative_speed,
    switching_sign,
    wrap_angle,
)

P = CavfParams(a=1.0, r_o=1.0, r_i=3.0, psi_d=0.0)
STATIC = Obstacle((0.0, 0.0), P)
MOVER = Obstacle((0.0, 0.0), P, V_o=0.9, theta_o=2.35)

angles = st.floats(-10.0, 10.0, allow_nan=False)
radii = st.floats(1.0, 3.0, allow_nan=False)


def test_wrap_angle_range():
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert wrap_angle(0.0) == 0.0


@pytest.mark.parametrize("kw", [dict(a=0.0, r_o=1, r_i=3), dict(a=1, r_o=3, r_i=3),
                                dict(a=1, r_o=0.0, r_i=3), dict(a=-1, r_o=1, r_i=2)])
def test_params_validation(kw):
    with pytest.raises(DomainError):
        CavfParams(**kw)


def test_obstacle_motion_is_linear():
    ob = Obstacle((1.0, 2.0), P, V_o=0.5, theta_o=math.pi / 2)
    assert ob.position(2.0) == pytest.approx((1.0, 3.0))
    assert ob.at(2.0).center == pytest.approx((1.0, 3.0))
    assert not ob.is_static and STATIC.is_static


def test_gamma_ends_and_midpoint():
    assert gamma(1.0, P) == 0.0
    assert gamma(3.0, P) == 1.0
    # the bracket vanishes at the midpoint of the annulus
    assert gamma(2.0, P) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(DomainError):
        gamma(0.99, P)
    with pytest.raises(DomainError):
        gamma(3.01, P)


def test_gamma_limits_approached_continuously():
    assert gamma(1.0 + 1e-9, P) < 1e-8
    assert gamma(3.0 - 1e-9, P) > 1 - 1e-8


@pytest.mark.parametrize("a", [0.1, 0.3, 1.0, 3.0, 10.0])
def test_gamma_strictly_increasing(a):
    p = CavfParams(a, 1.0, 3.0)
    r = np.linspace(1.0, 3.0, 2001)[1:-1]
    g = np.array([gamma(x, p) for x in r])
    assert np.all(np.diff(g) > 0)


@pytest.mark.parametrize("r", [1.05, 1.5, 2.0, 2.7, 2.95])
def test_gamma_prime_matches_fd(r):
    h = 1e-6
    fd = (gamma(r + h, P) - gamma(r - h, P)) / (2 * h)
    assert gamma_prime(r, P) == pytest.approx(fd, rel=1e-6)


def test_lambda_sector_values():
    r = 2.0
    g = gamma(r, P)
    assert lam(r, math.pi, P) == pytest.approx(g)
    # behind the obstacle the field recovers the free stream
    assert lam(r, 0.0, P) == pytest.approx(1.0)
    assert lam(r, math.pi / 2, P) == pytest.approx(g)
    assert lam(r, -math.pi / 2, P) == pytest.approx(g)


@given(radii, angles, st.floats(-4, 4))
def test_lambda_in_unit_interval(r, theta, psi_d):
    p = CavfParams(1.0, 1.0, 3.0, psi_d)
    assert -1e-15 <= lam(r, theta, p) <= 1 + 1e-15


def test_lambda_outside_influence_is_one():
    assert lam_partials(3.5, 0.3, P) == (1.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        lam(0.5, 0.0, P)


def test_lambda_is_one_on_influence_circle():
    for th in np.linspace(-math.pi, math.pi, 73):
        assert lam(3.0, th, P) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("boundary", [0.0, math.pi / 2, 3 * math.pi / 2])
@pytest.mark.parametrize("r", [1.0, 1.4, 2.0, 2.9])
def test_lambda_continuous_at_sector_boundaries(boundary, r):
    eps = 1e-9
    psi_d = 0.4
    p = CavfParams(1.0, 1.0, 3.0, psi_d)
    left = lam(r, psi_d + boundary - eps, p)
    right = lam(r, psi_d + boundary + eps, p)
    assert abs(left - right) < 1e-6


@settings(max_examples=60)
@given(st.floats(1.05, 2.95), angles)
def test_lambda_partials_match_fd(r, theta):
    d = (theta - P.psi_d) % (2 * math.pi)
    # skip the kinks between sectors
    if min(abs(d - b) for b in (0.0, math.pi / 2, 3 * math.pi / 2, 2 * math.pi)) < 1e-4:
        return
    an = lam_partials(r, theta, P)
    fd = lam_partials_fd(r, theta, P)
    assert an[1] == pytest.approx(fd[1], rel=1e-4, abs=1e-6)
    assert an[2] == pytest.approx(fd[2], rel=1e-4, abs=1e-6)


def test_switching_sign():
    assert switching_sign(0.5) == 1.0
    assert switching_sign(-0.5) == -1.0
    assert switching_sign(0.0, side=1) == 1.0
    assert switching_sign(0.0, side=-1) == -1.0
    assert switching_sign(-1e-4, 0.01, side=1) == 1.0


@settings(max_examples=80)
@given(st.floats(1.0, 6.0), angles, st.floats(0.2, 3.0))
def test_static_field_has_agent_speed(r, theta, V):
    p = (r * math.cos(theta), r * math.sin(theta))
    assert cavf_static(p, STATIC, V).speed == pytest.approx(V, abs=1e-9)


@settings(max_examples=80)
@given(st.floats(1.0, 6.0), angles)
def test_moving_field_has_agent_speed(r, theta):
    p = (r * math.cos(theta), r * math.sin(theta))
    assert cavf_moving(p, MOVER, 1.0).speed == pytest.approx(1.0, abs=1e-9)


def test_far_field_is_exact_free_stream():
    p = CavfParams(1.0, 1.0, 3.0, 0.7)
    for ob in (Obstacle((0, 0), p), Obstacle((0, 0), p, 0.5, 1.0)):
        v = cavf((5.0, -2.0), ob, 1.3).velocity
        assert v[0] == 1.3 * math.cos(0.7) and v[1] == 1.3 * math.sin(0.7)


def test_static_surface_front_is_tangential():
    # front half of the surface: radial component vanishes
    for th in np.linspace(math.pi / 2 + 0.01, 3 * math.pi / 2 - 0.01, 181):
        f = cavf_static((math.cos(th), math.sin(th)), STATIC, 1.0)
        assert abs(f.radial_component) < 1e-12


def test_static_surface_radial_is_nonnegative():
    for th in np.linspace(-math.pi, math.pi, 721):
        f = cavf_static((math.cos(th), math.sin(th)), STATIC, 1.0)
        assert f.radial_component >= -1e-12


def test_moving_surface_front_matches_obstacle_velocity():
    psi_b = relative_heading(1.0, 0.0, 0.9, 2.35)
    ov = MOVER.velocity
    for th in np.linspace(psi_b + math.pi / 2 + 0.01, psi_b + 3 * math.pi / 2 - 0.01, 181):
        e = np.array([math.cos(th), math.sin(th)])
        f = cavf_moving(tuple(e), MOVER, 1.0)
        assert abs(f.velocity @ e - ov @ e) < 1e-9


def test_upstream_head_on_uses_tie_break_side():
    p = (-2.0, 0.0)
    up = cavf_static(p, STATIC, 1.0, side=1).velocity
    down = cavf_static(p, STATIC, 1.0, side=-1).velocity
    # side +1 passes with the obstacle on the right, i.e. turns left
    assert up[1] > 0 > down[1]
    assert up[0] == pytest.approx(down[0])


def test_inside_obstacle_is_an_error():
    with pytest.raises(DomainError):
        cavf((0.5, 0.0), STATIC, 1.0)
    with pytest.raises(DomainError):
        cavf_static((2.0, 0.0), MOVER, 1.0)


def test_relative_speed_root():
    V, V_o = 1.0, 0.9
    for chi in np.linspace(-math.pi, math.pi, 37):
        V_b = solve_relative_speed(V, V_o, chi)
        assert V_b > 0
        assert V_b ** 2 - 2 * V_b * V_o * math.cos(chi) + V_o ** 2 == pytest.approx(V ** 2)
    with pytest.raises(DomainError):
        solve_relative_speed(0.9, 0.9, 0.0)


def test_relative_heading_is_direction_of_relative_velocity():
    psi_b = relative_heading(1.0, 0.0, 0.9, 2.35)
    rel = np.array([1.0, 0.0]) - 0.9 * np.array([math.cos(2.35), math.sin(2.35)])
    assert psi_b == pytest.approx(math.atan2(rel[1], rel[0]))


def test_relative_state_round_trip():
    p, psi = (1.5, 1.2), 0.4
    s = relative_state(p, psi, MOVER, 1.0)
    vx = -s.V_b * math.cos(s.phi + s.theta) + MOVER.velocity[0]
    vy = -s.V_b * math.sin(s.phi + s.theta) + MOVER.velocity[1]
    assert (vx, vy) == pytest.approx((math.cos(psi), math.sin(psi)))
