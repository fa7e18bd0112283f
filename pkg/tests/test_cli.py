from __future__ import annotations

import hashlib
import json
import math

import pytest

from slc_lab import cli, config
from slc_lab.errors import ConfigurationError


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_curv_csv(capsys):
    code, out, _ = run(["curv", "--matrix", "diag:2,0.5", "--theta", str(math.pi / 2)], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "# command: curv"
    assert any(line.startswith("# config_sha256: ") for line in lines)
    assert lines[-2] == "value"
    assert float(lines[-1]) == pytest.approx(1.0, abs=1e-11)


def test_bounds_json(capsys):
    code, out, _ = run(["bounds", "--n", "2", "--theta", str(3 * math.pi / 4), "--r", "3", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    row = doc["rows"][0]
    assert row["dist_upper"] == pytest.approx(1.11191381674, abs=1e-10)
    assert doc["header"]["command"] == "bounds"


def test_deterministic_output(tmp_path):
    cfg = tmp_path / "kp.json"
    cfg.write_text(
        json.dumps(
            {
                "command": "kp",
                "domain": {"points": [[0, 0, 1], [1, 0, 0], [0, 1, 0]]},
                "points": [[0.2, -0.1], [0.5, 0.5]],
                "random": 32,
                "directions": 4,
                "steps": 8,
                "seed": 5,
            }
        )
    )
    digests = []
    for k in range(2):
        out = tmp_path / f"out{k}.csv"
        assert cli.main(["kp", "--config", str(cfg), "--out", str(out)]) == 0
        digests.append(hashlib.sha256(out.read_bytes()).hexdigest())
    assert digests[0] == digests[1]


def test_solve_fuchsian_and_perron(capsys):
    theta = str(3 * math.pi / 4)
    code, out, _ = run(["solve", "--theta", theta, "--r", "3", "--mode", "FuchsianConstant", "--format", "json"], capsys)
    assert code == 0
    assert json.loads(out)["heights"][0] == pytest.approx(math.atanh(math.tan(3 * math.pi / 8) / 3), abs=1e-10)
    code, out, _ = run(
        ["solve", "--theta", theta, "--r", "3", "--mode", "RotSymProfile", "--method", "perron", "--h", "0.0625", "--rings", "16"],
        capsys,
    )
    assert code == 0


def test_below_threshold_exit_2(capsys):
    code, _, err = run(["bounds", "--n", "2", "--theta", str(3 * math.pi / 4), "--r", "1"], capsys)
    assert code == 2
    assert "below threshold" in err


def test_convergence_failure_exit_3(capsys):
    code, _, err = run(
        ["solve", "--theta", str(3 * math.pi / 4), "--r", "3", "--mode", "RotSymProfile", "--h", "0.0625",
         "--rings", "16", "--max-iter", "1", "--newton-tol", "1e-15"],
        capsys,
    )
    assert code == 3
    assert err.startswith("error:")


def test_missing_field_named(capsys):
    code, _, err = run(["bounds", "--n", "2", "--theta", "2.0"], capsys)
    assert code == 2
    assert "'r'" in err


def test_unknown_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "bounds", "n": 2, "theta": 2.0, "r": 3.0, "colour": "red"}))
    code, _, err = run(["bounds", "--config", str(cfg)], capsys)
    assert code == 2
    assert "colour" in err


def test_verify_passes(capsys):
    code, out, _ = run(["verify"], capsys)
    assert code == 0
    assert "false" not in out


def test_validate_types_and_digest():
    with pytest.raises(ConfigurationError, match="must be int"):
        config.validate("bounds", {"n": 2.5, "theta": 2.0, "r": 3.0})
    with pytest.raises(ConfigurationError):
        config.validate("solve", {"theta": 2.0, "r": 3.0, "mode": "Sphere"})
    a = config.validate("bounds", {"n": 2, "theta": 2.0, "r": 3.0})
    b = config.validate("bounds", {"r": 3.0, "theta": 2.0, "n": 2})
    assert a.digest() == b.digest()
    assert a.digest() != config.validate("bounds", {"n": 2, "theta": 2.0, "r": 3.0}, seed=1).digest()


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigurationError, match="not valid JSON"):
        config.load_config(bad)
    with pytest.raises(ConfigurationError, match="command"):
        config.load_config(_write(tmp_path, {"n": 2}))
    with pytest.raises(ConfigurationError, match="not 'kp'"):
        config.load_config(_write(tmp_path, {"command": "bounds"}), "kp")


def _write(tmp_path, data):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(data))
    return p


def test_fmt_num():
    assert cli.fmt_num(1.0) == "1.00000000000"
    assert cli.fmt_num(float("nan")) == "nan"
    assert cli.fmt_num(True) == "true"
    assert cli.fmt_num(3) == "3"
