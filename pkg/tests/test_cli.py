import json

import numpy as np
import pytest

from coulomb_chain.cli import main

SINE_CONFIG = {
    "ring": {"N": 8, "L": 1.0, "J_max": 12, "scale": "auto"},
    "force": {"L": 1.0, "a0": 0.0, "harmonics": [{"k": 1, "a": 0.0, "b": 0.5}]},
    "ode": {"t_end": 0.02, "rel_tol": 1e-10, "abs_tol": 1e-12, "sample_count": 5},
    "analysis": {"tail_fraction": 0.5},
    "output": {"directory": "out", "formats": ["csv", "json"]},
}


def write_config(tmp_path, obj):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(obj))
    return path


def run(cmd, tmp_path, obj, extra=()):
    cfg = write_config(tmp_path, obj)
    out = tmp_path / "out"
    code = main([cmd, "--config", str(cfg), "--out", str(out), *extra])
    return code, out


def test_coeffs_deterministic(tmp_path):
    cfg = write_config(tmp_path, SINE_CONFIG)
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(["coeffs", "--config", str(cfg), "--out", str(out_a)]) == 0
    assert main(["coeffs", "--config", str(cfg), "--out", str(out_b)]) == 0
    assert main(["coeffs", "--config", str(cfg), "--out", str(out_a)]) == 0  # overwrite
    for name in ("coeffs_N8.csv", "coeffs_N8.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_coeffs_constant_force_zero_columns(tmp_path):
    obj = dict(SINE_CONFIG)
    obj["force"] = {"L": 1.0, "a0": 2.0, "harmonics": []}
    code, out = run("coeffs", tmp_path, obj)
    assert code == 0
    rows = (out / "coeffs_N8.csv").read_text().strip().splitlines()
    assert rows[0] == "i,j,c_scaled,scale,N,L,J_max"
    for row in rows[1:]:
        i, j, c = row.split(",")[:3]
        if int(j) >= 2:
            assert float(c) == 0.0


def test_coeffs_grid_writes_one_file_per_n(tmp_path):
    obj = dict(SINE_CONFIG)
    obj["ring"] = {"N": [8, 16], "L": 1.0, "J_max": 10, "scale": "auto"}
    code, out = run("coeffs", tmp_path, obj)
    assert code == 0
    for n in (8, 16):
        assert (out / f"coeffs_N{n}.csv").exists()
        payload = json.loads((out / f"coeffs_N{n}.json").read_text())
        assert payload["config"]["N"] == n
        assert len(payload["coefficients"]) == n * 10


def test_csv_round_trip_against_library(tmp_path):
    code, out = run("coeffs", tmp_path, SINE_CONFIG)
    assert code == 0
    from coulomb_chain import ForceSpec, Harmonic, RingConfig, compute_coefficients

    table = compute_coefficients(
        RingConfig(
            N=8, L=1.0, force=ForceSpec(L=1.0, harmonics=(Harmonic(1, 0.0, 0.5),)), j_max=12
        )
    )
    rows = (out / "coeffs_N8.csv").read_text().strip().splitlines()[1:]
    parsed = np.zeros((8, 13))
    for row in rows:
        fields = row.split(",")
        parsed[int(fields[0]), int(fields[1])] = float(fields[2])
    np.testing.assert_array_equal(parsed[:, 1:], table.data[:, 1:])


def test_schema_rejection_names_field(tmp_path, capsys):
    obj = dict(SINE_CONFIG)
    obj["ring"] = {"N": "eight", "L": 1.0, "J_max": 12}
    code, _ = run("coeffs", tmp_path, obj)
    assert code == 2
    assert "ring.N" in capsys.readouterr().err


def test_schema_rejects_bad_harmonic(tmp_path, capsys):
    obj = dict(SINE_CONFIG)
    obj["force"] = {"L": 1.0, "harmonics": [{"k": 0, "a": 1.0}]}
    code, _ = run("coeffs", tmp_path, obj)
    assert code == 2
    assert "force.harmonics[0].k" in capsys.readouterr().err


def test_schema_rejects_decreasing_grid(tmp_path, capsys):
    obj = dict(SINE_CONFIG)
    obj["ring"] = {"N": [16, 8], "L": 1.0, "J_max": 12}
    code, _ = run("coeffs", tmp_path, obj)
    assert code == 2
    assert "ring.N" in capsys.readouterr().err


def test_overflow_exit_code(tmp_path, capsys):
    obj = dict(SINE_CONFIG)
    obj["ring"] = {"N": 16, "L": 1.0, "J_max": 24, "scale": 1e40}
    code, _ = run("coeffs", tmp_path, obj)
    assert code == 3
    assert "overflow" in capsys.readouterr().err.lower()


def test_radius_degenerate_for_constant_force(tmp_path):
    obj = dict(SINE_CONFIG)
    obj["force"] = {"L": 1.0, "a0": 2.0, "harmonics": []}
    code, out = run("radius", tmp_path, obj)
    assert code == 0
    payload = json.loads((out / "radius.json").read_text())
    assert payload["radius"][0]["degenerate"] is True
    assert payload["radius"][0]["R_hat"] is None


def test_radius_report_shape(tmp_path):
    obj = dict(SINE_CONFIG)
    obj["ring"] = {"N": [8, 16, 32], "L": 1.0, "J_max": 12, "scale": "auto"}
    code, out = run("radius", tmp_path, obj)
    assert code == 0
    payload = json.loads((out / "radius.json").read_text())
    assert [e["N"] for e in payload["radius"]] == [8, 16, 32]
    assert all(e["R_hat"] > 0 for e in payload["radius"])
    assert payload["trend"]["monotone_ok"] is True


def test_compare_constant_force(tmp_path):
    obj = dict(SINE_CONFIG)
    obj["force"] = {"L": 1.0, "a0": 1.5, "harmonics": []}
    code, out = run("compare", tmp_path, obj)
    assert code == 0
    payload = json.loads((out / "compare.json").read_text())
    assert payload["max_rel_velocity_error"] <= 1e-12


def test_compare_zero_force(tmp_path):
    obj = dict(SINE_CONFIG)
    obj["force"] = {"L": 1.0, "a0": 0.0, "harmonics": []}
    code, out = run("compare", tmp_path, obj)
    assert code == 0
    payload = json.loads((out / "compare.json").read_text())
    assert payload["max_rel_velocity_error"] == 0.0


def test_compare_sine_force(tmp_path):
    obj = dict(SINE_CONFIG)
    obj["ring"] = {"N": 8, "L": 1.0, "J_max": 24, "scale": "auto"}
    code, out = run("compare", tmp_path, obj)
    assert code == 0
    payload = json.loads((out / "compare.json").read_text())
    assert payload["max_rel_velocity_error"] <= 1e-6
    assert payload["per_N"][0]["horizon"] <= 0.5 * payload["per_N"][0]["R_hat"] + 1e-15


def test_verify_passes(tmp_path, capsys):
    code, out = run("verify", tmp_path, SINE_CONFIG)
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert all(line.startswith("PASS") for line in lines)
    payload = json.loads((out / "verify.json").read_text())
    assert payload["passed"] is True


def test_sweep_report(tmp_path):
    obj = dict(SINE_CONFIG)
    obj["ring"] = {"N": [16, 32, 64, 128], "L": 1.0, "J_max": 9, "scale": "auto"}
    code, out = run("sweep", tmp_path, obj, extra=["--threads", "2"])
    assert code == 0
    payload = json.loads((out / "sweep.json").read_text())
    assert {e["j"] for e in payload["exponents"]} == {1, 3, 5, 7, 9}
    assert payload["bounds"]["hard_c3_ok"] is True
    assert payload["radius"] and payload["trend"]["monotone_ok"] is True
    assert payload["majorant"]["g"][0] == 1.0
    # flattened CSV companions for plotting
    exp_rows = (out / "exponents.csv").read_text().strip().splitlines()
    assert exp_rows[0] == "j,slope,half_width,cap_half,cap_five_sixths"
    assert len(exp_rows) == 6
    rad_rows = (out / "radius.csv").read_text().strip().splitlines()
    assert len(rad_rows) == 5


def test_simulate_writes_trajectory(tmp_path):
    code, out = run("simulate", tmp_path, SINE_CONFIG)
    assert code == 0
    rows = (out / "trajectory_N8.csv").read_text().strip().splitlines()
    assert rows[0] == "t,i,x,v"
    assert len(rows) == 1 + 8 * 6  # sample_count+1 times, N particles
    payload = json.loads((out / "simulate.json").read_text())
    run_info = payload["runs"][0]
    assert run_info["N"] == 8
    assert run_info["max_energy_drift"] <= 1e-7


def test_format_override(tmp_path):
    cfg = write_config(tmp_path, SINE_CONFIG)
    out = tmp_path / "csvonly"
    assert main(["coeffs", "--config", str(cfg), "--out", str(out), "--format", "csv"]) == 0
    assert (out / "coeffs_N8.csv").exists()
    assert not (out / "coeffs_N8.json").exists()


def test_missing_config_file(tmp_path, capsys):
    assert main(["coeffs", "--config", str(tmp_path / "nope.json")]) == 2
    assert "error:" in capsys.readouterr().err
