import math

import numpy as np
import pytest

from cavf.control import (
    ControlConfig,
    control_mixed,
    control_single,
    control_static,
    control_tracking,
    field_heading_rate,
    gain_for,
    tracking_gain,
    tracking_state,
)
from cavf.errors import DomainError
from cavf.fields import CavfParams, Obstacle, cavf, relative_state, wrap_angle
from cavf.simulation import AgentState

P = CavfParams(1.0, 1.0, 3.0, 0.0)
STATIC = Obstacle((0.0, 0.0), P)
MOVER = Obstacle((0.0, 0.0), P, V_o=0.9, theta_o=2.35)

POINTS = [(-2.0, 0.7), (-1.2, 1.1), (0.3, 1.6), (1.4, -1.5), (-0.5, -2.2), (2.1, 0.8)]


def fd_heading_rate(p, ob, V, h=1e-6):
    """Rate of the field heading seen while riding the field itself."""
    v = cavf(p, ob, V).velocity

    def heading(s):
        q = (p[0] + s * v[0], p[1] + s * v[1])
        return cavf(q, ob.at(s), V).heading

    return wrap_angle(heading(h) - heading(-h)) / (2 * h)


def test_config_validation():
    with pytest.raises(DomainError):
        ControlConfig(gain_mode="separation")
    with pytest.raises(DomainError):
        ControlConfig(gain_mode="adaptive", c_num=None)
    with pytest.raises(DomainError):
        ControlConfig(mode="other")
    with pytest.raises(DomainError):
        ControlConfig(vartheta=0.0)


@pytest.mark.parametrize("p", POINTS)
def test_static_law_matches_fd_along_streamline(p):
    psi = cavf(p, STATIC, 1.0).heading
    u = control_single(p, psi, STATIC, 1.0).u
    assert u == pytest.approx(fd_heading_rate(p, STATIC, 1.0), abs=1e-6)


@pytest.mark.parametrize("p", POINTS)
def test_dynamic_law_matches_fd_along_streamline(p):
    psi = cavf(p, MOVER, 1.0).heading
    u = control_single(p, psi, MOVER, 1.0).u
    assert u == pytest.approx(fd_heading_rate(p, MOVER, 1.0), abs=1e-3)


def test_fd_derivative_option_agrees():
    p = POINTS[1]
    psi = cavf(p, STATIC, 1.0).heading
    a = control_single(p, psi, STATIC, 1.0).u
    b = control_single(p, psi, STATIC, 1.0, ControlConfig(derivatives="fd")).u
    assert a == pytest.approx(b, abs=1e-5)


@pytest.mark.parametrize("ob", [STATIC, MOVER])
@pytest.mark.parametrize("p", POINTS)
def test_field_heading_rate_equals_exact_law_on_streamline(ob, p):
    psi = cavf(p, ob, 1.0).heading
    v = (math.cos(psi), math.sin(psi))
    assert field_heading_rate(p, v, ob, 1.0) == pytest.approx(control_single(p, psi, ob, 1.0).u, abs=1e-9)


def test_field_heading_rate_zero_outside_influence():
    assert field_heading_rate((5.0, 0.0), (1.0, 0.0), STATIC, 1.0) == 0.0


def test_free_stream_beyond_influence_needs_no_turn():
    out = control_single((4.0, 0.5), 0.0, STATIC, 1.0)
    assert out.u == pytest.approx(0.0, abs=1e-15)


def test_switching_correction_branch():
    # heading straight at the centre
    s = relative_state((-2.0, 0.0), 0.0, STATIC, 1.0)
    out = control_static(s, P, 1.0)
    assert out.branch == "switching_correction"
    left = control_static(s, P, 1.0, side=1).u
    right = control_static(s, P, 1.0, side=-1).u
    assert left == pytest.approx(-right)


def test_inside_obstacle_rejected():
    with pytest.raises(DomainError):
        control_single((0.2, 0.0), 0.0, STATIC, 1.0)


def test_tracking_gain_value():
    assert tracking_gain(1.0, 0.01, 0.516) == pytest.approx(22.29, abs=5e-3)
    with pytest.raises(DomainError):
        tracking_gain(1.0, 0.01, 0.0)


def test_gain_modes():
    assert gain_for(ControlConfig(K=25.0), 1.0, 0.3) == 25.0
    sep = ControlConfig(gain_mode="separation", delta=0.516)
    assert gain_for(sep, 1.0, 0.3) == pytest.approx(tracking_gain(1.0, 0.01, 0.516))
    ad = ControlConfig(gain_mode="adaptive", c_num=11.5)
    assert gain_for(ad, 1.0, 0.5) == pytest.approx(23.0)
    assert gain_for(ad, 1.0, math.inf) == 0.0


def test_tracking_law():
    agent = AgentState(0.0, 0.0, 0.3)
    out = control_tracking(agent, 0.1, 0.05, 10.0)
    assert out.u == pytest.approx(-10.0 * 0.2 + 0.05)
    # error is wrapped
    assert control_tracking(AgentState(0, 0, 3.0), -3.0, 0.0, 1.0).u == pytest.approx(-wrap_angle(6.0))


def test_tracking_state():
    s = tracking_state(1.0, 0.5, 20.0, 1.0, 0.516)
    assert s.e == pytest.approx(0.5) and s.t_track == pytest.approx(0.258)


def test_mixed_single_obstacle_reduces_to_own_rate():
    p = POINTS[0]
    psi = cavf(p, STATIC, 1.0).heading
    agent = AgentState(p[0], p[1], psi)
    out = control_mixed(agent, [STATIC])
    assert out.u == pytest.approx(control_single(p, psi, STATIC, 1.0).u)
    assert out.diagnostics["psi_ca"] == pytest.approx(psi)


def test_mixed_degenerate_falls_back_to_nearest():
    a = Obstacle((0.0, 1.5), CavfParams(1.0, 1.0, 2.0, 0.0))
    b = Obstacle((0.0, -1.5), CavfParams(1.0, 1.0, 2.0, math.pi))
    out = control_mixed(AgentState(0.0, 0.0, 0.0), [a, b])
    assert out.branch == "degenerate_fallback"
    assert np.isfinite(out.u)
