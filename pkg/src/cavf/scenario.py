"""
Scenario files: parsing, validation, serialization and random generation.

A scenario is a JSON document::

    {
      "name": "...",
      "agent": {"x": 0, "y": 1.3, "psi": 0, "V": 1, "psi_d": 0, "r_s": 12},
      "obstacle_defaults": {"r_o": 0.3, "a": 1, "r_i": 2},
      "obstacles": [{"center": [3, 1], "V_o": 0, "theta_o": "135deg"}, ...],
      "control": {"mode": "tracking", "gain_mode": "fixed", "K": 25, ...},
      "mix": {"eps_m": 0.9, "min_separation": 0.516},
      "sim": {"dt": 0.01, "t_final": 24, "tie_break_side": "left"}
    }

Angles are radians; a string with a ``deg`` suffix is read as degrees.
Unknown keys are rejected.  ``scenario_to_dict`` writes every default out
explicitly, so a saved file fully describes the run.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path

import numpy as np

from .control import ControlConfig
from .errors import CavfError, ScenarioError
from .fields import CavfParams, Obstacle
from .mixing import MixConfig
from .simulation import AgentState, SimConfig, check_separation

BUNDLED = ("scenario1_forest", "scenario2_airspace", "scenario3_clutter")

_AGENT_KEYS = {"x", "y", "psi", "V", "psi_d", "r_s"}
_OBSTACLE_KEYS = {"center", "r_o", "r_i", "a", "V_o", "theta_o"}
_CONTROL_KEYS = {f.name for f in fields(ControlConfig)}
_MIX_KEYS = {f.name for f in fields(MixConfig)}
_SIM_KEYS = {f.name for f in fields(SimConfig)}
_TOP_KEYS = {"name", "description", "agent", "obstacle_defaults", "obstacles", "control", "mix", "sim"}
_ANGLE_KEYS = {"psi", "psi_d", "theta_o", "vartheta", "e_psi"}
_DEG = re.compile(r"^\s*([-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?)\s*deg\s*$")


@dataclass
class Scenario:
    agent: AgentState
    obstacles: list[Obstacle]
    control: ControlConfig = field(default_factory=ControlConfig)
    mix: MixConfig = field(default_factory=MixConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    name: str = "scenario"
    description: str = ""


def _angle(value, where: str) -> float:
    if isinstance(value, str):
        m = _DEG.match(value)
        if not m:
            raise ScenarioError(f"{where}: cannot read angle {value!r} (use radians or '<n>deg')")
        return math.radians(float(m.group(1)))
    return _number(value, where)


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _check_keys(obj, allowed: set, where: str):
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected an object, got {type(obj).__name__}")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ScenarioError(f"{where}: unknown key(s) {', '.join(unknown)}")


def _values(obj: dict, where: str) -> dict:
    out = {}
    for k, v in obj.items():
        if k in _ANGLE_KEYS:
            out[k] = _angle(v, f"{where}.{k}")
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            out[k] = float(v)
        else:
            out[k] = v
    return out


def _side(value, where: str) -> int:
    if value in ("left", 1, 1.0):
        return 1
    if value in ("right", -1, -1.0):
        return -1
    raise ScenarioError(f"{where}: tie_break_side must be 'left', 'right', 1 or -1, got {value!r}")


def scenario_from_dict(doc: dict) -> Scenario:
    """Build and validate a :class:`Scenario` from a parsed document."""
    _check_keys(doc, _TOP_KEYS, "scenario")
    for key in ("agent", "obstacles"):
        if key not in doc:
            raise ScenarioError(f"scenario: missing required key {key!r}")

    _check_keys(doc["agent"], _AGENT_KEYS, "agent")
    agent_vals = _values(doc["agent"], "agent")
    for key in ("x", "y", "V"):
        if key not in agent_vals:
            raise ScenarioError(f"agent: missing required key {key!r}")
    agent_vals.setdefault("psi_d", 0.0)
    agent_vals.setdefault("psi", agent_vals["psi_d"])
    try:
        agent = AgentState(**agent_vals)
    except TypeError as exc:
        raise ScenarioError(f"agent: {exc}") from None
    if not agent.V > 0:
        raise ScenarioError(f"agent.V: speed must be positive, got {agent.V}")
    if not agent.r_s > 0:
        raise ScenarioError(f"agent.r_s: sensing radius must be positive, got {agent.r_s}")

    defaults = doc.get("obstacle_defaults", {})
    _check_keys(defaults, _OBSTACLE_KEYS - {"center"}, "obstacle_defaults")
    defaults = _values(defaults, "obstacle_defaults")
    if not isinstance(doc["obstacles"], list):
        raise ScenarioError("obstacles: expected a list")
    obstacles = []
    for j, raw in enumerate(doc["obstacles"]):
        where = f"obstacles[{j}]"
        _check_keys(raw, _OBSTACLE_KEYS, where)
        vals = {**defaults, **_values(raw, where)}
        missing = sorted({"center", "r_o", "r_i", "a"} - set(vals))
        if missing:
            raise ScenarioError(f"{where}: missing {', '.join(missing)}")
        c = vals["center"]
        if not (isinstance(c, list) and len(c) == 2):
            raise ScenarioError(f"{where}.center: expected [x, y]")
        center = (_number(c[0], f"{where}.center[0]"), _number(c[1], f"{where}.center[1]"))
        try:
            params = CavfParams(vals["a"], vals["r_o"], vals["r_i"], agent.psi_d)
            ob = Obstacle(center, params, vals.get("V_o", 0.0), vals.get("theta_o", 0.0))
        except CavfError as exc:
            raise ScenarioError(f"{where}: {exc}") from None
        if not agent.V > ob.V_o:
            raise ScenarioError(f"{where}.V_o: obstacle speed {ob.V_o} must be below agent speed {agent.V}")
        d0 = math.hypot(agent.x - center[0], agent.y - center[1])
        if d0 < ob.r_o:
            raise ScenarioError(f"{where}: agent starts inside the obstacle")
        obstacles.append(ob)

    control_doc = doc.get("control", {})
    _check_keys(control_doc, _CONTROL_KEYS, "control")
    mix_doc = doc.get("mix", {})
    _check_keys(mix_doc, _MIX_KEYS, "mix")
    sim_doc = dict(doc.get("sim", {}))
    _check_keys(sim_doc, _SIM_KEYS, "sim")
    if "tie_break_side" in sim_doc:
        sim_doc["tie_break_side"] = _side(sim_doc["tie_break_side"], "sim.tie_break_side")
    if "random_seed" in sim_doc:
        seed = sim_doc["random_seed"]
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise ScenarioError(f"sim.random_seed: expected an integer, got {seed!r}")
    try:
        control = ControlConfig(**_values(control_doc, "control"))
        mix = MixConfig(**_values(mix_doc, "mix"))
        sim = SimConfig(**{k: (v if k in ("tie_break_side", "random_seed") else _number(v, f"sim.{k}"))
                           for k, v in sim_doc.items()})
    except CavfError as exc:
        raise ScenarioError(str(exc)) from None

    scenario = Scenario(agent, obstacles, control, mix, sim,
                        name=str(doc.get("name", "scenario")),
                        description=str(doc.get("description", "")))
    validate_scenario(scenario)
    return scenario


def validate_scenario(scenario: Scenario) -> None:
    """Check separation among the obstacles sensed at t = 0."""
    agent = scenario.agent
    known = [
        j for j, ob in enumerate(scenario.obstacles)
        if math.hypot(agent.x - ob.center[0], agent.y - ob.center[1]) <= agent.r_s
    ]
    check_separation(scenario.obstacles, known, scenario.mix.min_separation, 0.0)


def scenario_to_dict(scenario: Scenario) -> dict:
    """Serialize with every default written out."""
    agent = asdict(scenario.agent)
    control = asdict(scenario.control)
    obstacles = [
        {"center": list(ob.center), "r_o": ob.r_o, "r_i": ob.r_i, "a": ob.cavf.a,
         "V_o": ob.V_o, "theta_o": ob.theta_o}
        for ob in scenario.obstacles
    ]
    return {
        "name": scenario.name,
        "description": scenario.description,
        "agent": agent,
        "obstacles": obstacles,
        "control": control,
        "mix": asdict(scenario.mix),
        "sim": asdict(scenario.sim),
    }


def dumps_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2) + "\n"


def save_scenario(scenario: Scenario, path) -> Path:
    path = Path(path)
    path.write_text(dumps_scenario(scenario))
    return path


def loads_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return scenario_from_dict(doc)


def bundled_path(name: str) -> Path:
    stem = name[:-5] if name.endswith(".json") else name
    if stem not in BUNDLED:
        raise ScenarioError(f"no bundled scenario named {name!r} (have {', '.join(BUNDLED)})")
    return Path(resources.files("cavf") / "data" / f"{stem}.json")


def load_scenario(path) -> Scenario:
    """Load a scenario from a file path or the name of a bundled scenario."""
    p = Path(path)
    if not p.exists() and str(path).removesuffix(".json") in BUNDLED:
        p = bundled_path(str(path))
    try:
        text = p.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from None
    try:
        return loads_scenario(text)
    except ScenarioError as exc:
        raise ScenarioError(f"{p}: {exc}") from None


def generate_scenario(seed: int, n_obstacles: int = 8, *, V: float = 1.0,
                      region=((0.0, 14.0), (-4.0, 4.0)), r_o_range=(0.2, 0.6),
                      r_i_margin: float = 2.0, a: float = 1.0, moving_fraction: float = 0.5,
                      min_separation: float = 0.5, start=(-3.3, 0.0), r_s: float = 12.0,
                      t_final: float = 24.0, max_tries: int = 10000) -> Scenario:
    """Random clutter of static and moving obstacles.

    Speeds of moving obstacles are uniform in ``[0, V)`` and headings in
    ``[0, 2pi)``; placements closer than ``min_separation`` to another
    obstacle (or within ``r_i`` of the start point) are redrawn.
    """
    rng = np.random.default_rng(seed)
    (x0, x1), (y0, y1) = region
    obstacles: list[Obstacle] = []
    tries = 0
    while len(obstacles) < n_obstacles:
        tries += 1
        if tries > max_tries:
            raise ScenarioError(f"could not place {n_obstacles} obstacles after {max_tries} draws")
        r_o = float(rng.uniform(*r_o_range))
        center = (float(rng.uniform(x0, x1)), float(rng.uniform(y0, y1)))
        moving = rng.uniform() < moving_fraction
        V_o = float(rng.uniform(0.0, V)) if moving else 0.0
        theta_o = float(rng.uniform(0.0, 2 * math.pi)) if moving else 0.0
        r_i = r_o + r_i_margin
        if math.hypot(center[0] - start[0], center[1] - start[1]) <= r_i:
            continue
        if any(
            math.hypot(center[0] - ob.center[0], center[1] - ob.center[1]) - r_o - ob.r_o < min_separation
            for ob in obstacles
        ):
            continue
        obstacles.append(Obstacle(center, CavfParams(a, r_o, r_i, 0.0), V_o, theta_o))
    agent = AgentState(start[0], start[1], 0.0, V, 0.0, r_s)
    return Scenario(
        agent=agent,
        obstacles=obstacles,
        control=ControlConfig(gain_mode="adaptive", K=None, c_num=11.5),
        mix=MixConfig(min_separation=min_separation),
        sim=SimConfig(dt=0.01, t_final=t_final, random_seed=seed),
        name=f"generated_{seed}",
        description=f"random clutter, seed {seed}",
    )
