import io
import json

import numpy as np
import pytest

from hordyn.cli import main
from hordyn.config import ConfigError, ScenarioConfig

HORD_RPS = ["simulate", "--builtin", "rps", "--rule", "hord", "--num", "2,3", "--den", "1,3,2",
        "--x0", "0.5,0.3,0.2", "--t-final", "200"]
CASCADE_CONG = ["simulate", "--builtin", "congestion", "--rule", "cascade", "--num", "2,3.5,2",
         "--den", "1,3,2,0", "--t-final", "500"]


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def last_strategy(csv_text, n=3):
    row = csv_text.strip().splitlines()[-1].split(",")
    return np.array([float(v) for v in row[1:1 + n]])


def test_simulate_hord_rps():
    code, text = run(HORD_RPS)
    assert code == 0
    assert text.splitlines()[0] == "t,x1,x2,x3,p1,p2,p3"
    assert np.linalg.norm(last_strategy(text) - 1 / 3) <= 1e-4


def test_simulate_cascade_congestion():
    code, text = run(CASCADE_CONG)
    assert code == 0
    assert np.abs(last_strategy(text) - np.array([4, 6, 1]) / 11).max() <= 1e-4


def test_simulate_writes_files_and_replays(tmp_path):
    csv_path = tmp_path / "run.csv"
    code, _ = run(HORD_RPS[:-1] + ["20", "--out", str(csv_path)])
    assert code == 0
    meta = json.loads((tmp_path / "run.csv.json").read_text())
    assert meta["config"]["rule"] == {"kind": "hord", "num": [2.0, 3.0], "den": [1.0, 3.0, 2.0]}
    assert meta["integrator"]["t_final"] == 20
    replay = tmp_path / "replay.csv"
    code, _ = run(["simulate", "--config", str(tmp_path / "run.csv.json"), "--out", str(replay)])
    assert code == 0
    assert replay.read_bytes() == csv_path.read_bytes()


def test_simulate_is_deterministic():
    a, b = run(HORD_RPS[:-1] + ["30"]), run(HORD_RPS[:-1] + ["30"])
    assert a == b


@pytest.mark.parametrize("argv", [
    ["simulate", "--builtin", "rps", "--rule", "hord", "--num", "2,3"],
    ["simulate", "--rule", "rd"],
    ["simulate", "--builtin", "rps", "--x0", "0.5,0.5"],
    ["simulate", "--builtin", "rps", "--rule", "hord", "--num", "1,1", "--den", "1,1"],
    ["simulate", "--builtin", "rps", "--dt", "abc"],
    ["simulate", "--builtin", "nope"],
    ["frobnicate"],
])
def test_usage_errors_exit_1(argv, capsys):
    code, _ = run(argv)
    assert code == 1


def test_missing_den_names_field(capsys):
    code, _ = run(["simulate", "--builtin", "rps", "--rule", "hord", "--num", "2,3"])
    assert code == 1
    assert "den" in capsys.readouterr().err


def test_integration_failure_exit_2(tmp_path):
    # Unstable cascade pole drives the state to overflow
    code, _ = run(["simulate", "--matrix", "[[1e300, 0], [0, -1e300]]", "--rule", "cascade",
                   "--num", "1", "--den", "1,-50", "--t-final", "50", "--method", "rk4", "--x0", "0.9,0.1"])
    assert code == 2


def test_certify_strict_hord():
    code, text = run(["certify", "--num", "2,3", "--den", "1,3,2", "--strict"])
    assert code == 0
    assert json.loads(text)["strictly_passive"] is True


def test_certify_integrator_not_strict():
    code, text = run(["certify", "--num", "1", "--den", "1,0", "--strict"])
    assert code == 3
    assert json.loads(text)["strictly_passive"] is False
    assert run(["certify", "--num", "1", "--den", "1,0"])[0] == 0


def test_certify_with_game():
    code, text = run(["certify", "--num", "1", "--den", "1,1", "--game", "congestion"])
    assert code == 0
    assert json.loads(text)["global_certificate"]["verdict"] == "exponential"
    code, text = run(["certify", "--num", "1", "--den", "1,1", "--game", "rps"])
    assert code == 3 and json.loads(text)["global_certificate"]["refused"]


def test_certify_malformed():
    assert run(["certify", "--num", "x", "--den", "1"])[0] == 1
    assert run(["certify", "--num", "1"])[0] == 1


def test_analyze_linearize():
    code, text = run(["analyze", "linearize", "--builtin", "rps", "--rule", "hord", "--num", "2,3", "--den", "1,3,2"])
    assert code == 0 and json.loads(text)["max_real_part"] < 0
    code, text = run(["analyze", "linearize", "--builtin", "rps", "--rule", "rd"])
    assert code == 3
    code, _ = run(["analyze", "linearize", "--builtin", "rps", "--rule", "cascade", "--num", "1", "--den", "1,1"])
    assert code == 4
    code, _ = run(["analyze", "linearize", "--matrix", "[[0,0],[0,0]]", "--rule", "rd"])
    assert code == 4


def test_analyze_nash():
    code, text = run(["analyze", "nash", "--builtin", "congestion"])
    assert code == 0
    d = json.loads(text)
    np.testing.assert_allclose(d["x"], np.array([4, 6, 1]) / 11, atol=1e-15)
    assert d["residual"] <= 1e-10
    assert run(["analyze", "nash", "--matrix", "[[2,0],[0,-1]]"])[0] == 4


def test_analyze_exrd_fixed_point():
    code, text = run(["analyze", "exrd-fixed-point", "--builtin", "congestion"])
    assert code == 0 and json.loads(text)["residual"] <= 1e-12


def test_analyze_incremental_and_variational():
    code, text = run(["analyze", "incremental", "--builtin", "congestion", "--rule", "cascade",
                      "--num", "1", "--den", "1,1", "--t-final", "40"])
    assert code == 0 and json.loads(text)["fitted_rate"] < 0
    code, text = run(["analyze", "variational", "--builtin", "congestion", "--rule", "hord",
                      "--num", "1,0.5", "--den", "1,3,2"])
    assert code == 0 and json.loads(text)["max_abscissa"] < 0
    code, _ = run(["analyze", "contractiveness", "--builtin", "rps"])
    assert code == 0
    assert run(["analyze", "contractiveness", "--matrix", "[[1,0],[0,1]]"])[0] == 3


def test_list_builtins():
    code, text = run(["list-builtins"])
    assert code == 0 and set(json.loads(text)) == {"rps", "congestion"}


def test_config_roundtrip():
    doc = {"game": {"builtin": "congestion"}, "rule": {"kind": "cascade", "num": [1.0], "den": [1.0, 1.0]},
           "x0": [0.2, 0.3, 0.5], "integrator": {"method": "rk4", "dt": 0.01, "t_final": 5.0,
                                                   "output_interval": 0.1}, "seed": 3}
    cfg = ScenarioConfig.from_dict(doc)
    assert cfg.to_dict() == doc
    assert ScenarioConfig.from_dict(cfg.to_dict()) == cfg


@pytest.mark.parametrize("doc,field", [
    ({"game": {"builtin": "rps"}, "colour": 1}, "colour"),
    ({"game": {"builtin": "rps"}, "rule": {"kind": "hord", "num": [1]}}, "rule.den"),
    ({"game": {"builtin": "rps"}, "integrator": {"tol": 1}}, "integrator.tol"),
    ({"game": {"builtin": "rps"}, "integrator": {"dt": -1}}, "integrator.dt"),
    ({"rule": {"kind": "rd"}}, "game"),
    ({"game": {"builtin": "rps"}, "seed": 1.5}, "seed"),
])
def test_config_rejects(doc, field):
    with pytest.raises(ConfigError) as info:
        ScenarioConfig.from_dict(doc)
    assert info.value.field == field


def test_random_x0_uses_seed():
    cfg = ScenarioConfig.from_dict({"game": {"builtin": "rps"}, "x0": "random", "seed": 5})
    sys = cfg.build_system()
    np.testing.assert_array_equal(cfg.initial_state(sys), cfg.initial_state(sys))
