import subprocess
import sys


from cavf.cli import main
from cavf.export import export_trajectory
from cavf.fields import CavfParams, Obstacle
from cavf.control import ControlConfig
from cavf.scenario import Scenario, load_scenario, save_scenario
from cavf.simulation import AgentState, SimConfig, run


def test_simulate_bundled(tmp_path, capsys):
    assert main(["simulate", "scenario1_forest", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "scenario1_forest_trajectory.csv").exists()


def test_simulate_overrides(tmp_path):
    rc = main(["simulate", "scenario1_forest", "--out", str(tmp_path), "--dt", "0.02",
               "--t-final", "18", "--tie-break", "right", "--gain-mode", "separation"])
    assert rc == 0
    rows = (tmp_path / "scenario1_forest_trajectory.csv").read_text().splitlines()
    assert len(rows) == 1 + 901


def test_field_rows(tmp_path, capsys):
    assert main(["field", "--bounds", "-4", "4", "-4", "4", "--res", "40"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 1 + 1600


def test_field_to_file(tmp_path):
    p = tmp_path / "g.csv"
    assert main(["field", "--scenario", "scenario2_airspace", "--res", "5", "7", "--out", str(p)]) == 0
    assert len(p.read_text().splitlines()) == 1 + 35


def _colliding_trajectory(tmp_path):
    ob = Obstacle((3.0, 0.0), CavfParams(1, 0.5, 2))
    sc = Scenario(AgentState(0, 0, 0), [ob], ControlConfig(mode="none"), sim=SimConfig(0.01, 5.0))
    return export_trajectory(run(sc), tmp_path / "hit.csv")


def test_check_colliding_trajectory(tmp_path, capsys):
    path = _colliding_trajectory(tmp_path)
    assert main(["check", str(path)]) == 2
    assert "collision at t=2.5" in capsys.readouterr().err


def test_check_clean_trajectory(tmp_path):
    main(["simulate", "scenario2_airspace", "--out", str(tmp_path)])
    path = tmp_path / "scenario2_airspace_trajectory.csv"
    assert main(["check", str(path), "--scenario", "scenario2_airspace"]) == 0


def test_check_heading_failure(tmp_path, capsys):
    main(["simulate", "scenario1_forest", "--out", str(tmp_path)])
    path = tmp_path / "scenario1_forest_trajectory.csv"
    assert main(["check", str(path), "--psi-d", "1.0"]) == 1


def test_check_scenario(tmp_path, capsys):
    assert main(["check", "scenario3_clutter"]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text('{"agent": {"x": 0, "y": 0, "V": 1}, "obstacles": [{"center": [3, 0], "r_o": 2, "r_i": 1, "a": 1}]}')
    assert main(["check", str(bad)]) == 1
    assert "obstacles[0]" in capsys.readouterr().err


def test_usage_errors():
    assert main([]) == 1
    assert main(["simulate"]) == 1
    assert main(["simulate", "no_such_scenario"]) == 1
    assert main(["field", "--res", "1", "2", "3"]) == 1


def test_plot(tmp_path):
    out = tmp_path / "s.svg"
    assert main(["plot", "scenario1_forest", "--out", str(out), "--res", "10", "--t-final", "2"]) == 0
    assert out.read_text().lstrip().startswith("<?xml")


def test_generate(tmp_path):
    assert main(["generate", "--seed", "4", "--count", "2", "--out", str(tmp_path)]) == 0
    a = load_scenario(str(tmp_path / "generated_4.json"))
    assert load_scenario(str(tmp_path / "generated_5.json")) != a


def test_collision_exit_code_from_simulate(tmp_path):
    ob = Obstacle((3.0, 0.0), CavfParams(1, 0.5, 2))
    sc = Scenario(AgentState(0, 0, 0), [ob], ControlConfig(mode="none"), sim=SimConfig(0.01, 5.0), name="hit")
    path = save_scenario(sc, tmp_path / "hit.json")
    assert main(["simulate", str(path), "--out", str(tmp_path)]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "cavf", "check", "scenario1_forest"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
