"""Collision avoidance vector fields for constant-speed planar vehicles.

Per-obstacle fields (:mod:`cavf.fields`), their proximity blend
(:mod:`cavf.mixing`), steering laws (:mod:`cavf.control`), a fixed-step
closed-loop simulator (:mod:`cavf.simulation`) and scenario files, exports
and the ``cavf`` command (:mod:`cavf.scenario`, :mod:`cavf.export`,
:mod:`cavf.cli`).
"""

from .errors import CavfError, DegenerateBlendError, DomainError, ScenarioError, SingularityError
from .fields import (
    CavfParams,
    FieldSample,
    Obstacle,
    cavf,
    cavf_moving,
    cavf_static,
    gamma,
    lam,
    wrap_angle,
)
from .mixing import MixConfig, heading_rate_weights, mix_weights, mixed_cavf
from .control import (
    ControlConfig,
    control_dynamic,
    control_mixed,
    control_single,
    control_static,
    control_tracking,
    tracking_gain,
)
from .simulation import AgentState, SimConfig, Trajectory, check_collision, run, step
from .scenario import Scenario, generate_scenario, load_scenario, save_scenario

__version__ = "0.1.0"

__all__ = [
    "CavfError", "DegenerateBlendError", "DomainError", "ScenarioError", "SingularityError",
    "CavfParams", "FieldSample", "Obstacle", "cavf", "cavf_moving", "cavf_static", "gamma", "lam",
    "wrap_angle", "MixConfig", "heading_rate_weights", "mix_weights", "mixed_cavf",
    "ControlConfig", "control_dynamic", "control_mixed", "control_single", "control_static",
    "control_tracking", "tracking_gain", "AgentState", "SimConfig", "Trajectory",
    "check_collision", "run", "step", "Scenario", "generate_scenario", "load_scenario",
    "save_scenario",
]
