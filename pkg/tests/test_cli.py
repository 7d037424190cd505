"""Config validation, preset handling, artifact runs, sweeps, exit codes."""

import copy
import json
import math

import numpy as np
import pytest

from spincat.cli import main
from spincat.errors import ConfigError
from spincat.scenario import (
    SWEEP_AXES,
    build_scenario,
    preset_config,
    preset_names,
    run_scenario,
    sweep,
    validate_config,
)


def small_config(**overrides):
    cfg = {
        "schema": 1,
        "name": "small",
        "spectrum": {"kind": "ohmic", "alpha": 2.5e-5, "omega_c": 1.0,
                     "beta": None},
        "n_particles": 4,
        "theta": math.pi / 2.0,
        "phi": 0.0,
    }
    cfg.update(overrides)
    return cfg


def config_error(raw) -> ConfigError:
    with pytest.raises(ConfigError) as exc:
        validate_config(raw)
    return exc.value


# ---------------------------------------------------------------------------
# validation


def test_presets_all_validate():
    assert preset_names() == ["cavity", "fig1", "fig2", "phonon"]
    for name in preset_names():
        normalized = validate_config(preset_config(name))
        assert normalized["name"] == name
        build_scenario(normalized)  # physics objects construct cleanly


def test_preset_config_returns_fresh_copies():
    a = preset_config("fig1")
    a["spectrum"]["alpha"] = 99.0
    assert preset_config("fig1")["spectrum"]["alpha"] == 2.5e-5


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset_config("nope")


def test_minimal_config_defaults():
    normalized = validate_config(small_config())
    assert normalized["units"] == "omega_c"
    assert normalized["basis"] == "Lz"
    assert normalized["conventions"] == {"thermal": "coth-full", "mqs": "twist"}
    assert normalized["solver"] == {"horizon_factor": 1e6}
    assert normalized["outputs"] == ["report"]
    assert "time_grid" not in normalized
    assert normalized["spectrum"]["beta"] is None


def test_missing_required_fields_name_their_path():
    cfg = small_config()
    del cfg["spectrum"]
    assert config_error(cfg).field == "spectrum"

    cfg = small_config()
    del cfg["spectrum"]["alpha"]
    assert config_error(cfg).field == "spectrum.alpha"

    cfg = small_config()
    del cfg["n_particles"]
    assert config_error(cfg).field == "n_particles"


def test_unknown_fields_rejected():
    assert config_error(small_config(bogus=1)).field == "bogus"
    cfg = small_config()
    cfg["spectrum"]["extra"] = 2
    assert config_error(cfg).field == "spectrum.extra"


def test_bad_enums_rejected():
    cfg = small_config()
    cfg["spectrum"]["kind"] = "flat"
    assert config_error(cfg).field == "spectrum.kind"
    assert config_error(small_config(basis="Ly")).field == "basis"
    assert config_error(
        small_config(conventions={"thermal": "bogus"})).field == "conventions.thermal"
    assert config_error(
        small_config(conventions={"mqs": "bogus"})).field == "conventions.mqs"


def test_schema_version_checked():
    assert config_error(small_config(schema=2)).field == "schema"
    cfg = small_config()
    del cfg["schema"]
    assert config_error(cfg).field == "schema"


def test_grid_requirements_follow_outputs():
    err = config_error(small_config(outputs=["kernels", "report"]))
    assert err.field == "time_grid"
    err = config_error(small_config(outputs=["snapshots"]))
    assert err.field == "snapshot_times"
    # present grids validate even when their output is not requested
    normalized = validate_config(small_config(
        time_grid={"kind": "log", "start": 0.1, "stop": 10.0, "count": 5}))
    assert normalized["time_grid"]["count"] == 5


def test_output_list_checked_and_canonicalized():
    assert config_error(small_config(outputs=[])).field == "outputs"
    assert config_error(
        small_config(outputs=["report", "report"])).field == "outputs[1]"
    assert config_error(small_config(outputs=["plots"])).field == "outputs[0]"
    normalized = validate_config(small_config(
        outputs=["report", "kernels"],
        time_grid={"kind": "log", "start": 0.1, "stop": 10.0, "count": 5}))
    assert normalized["outputs"] == ["kernels", "report"]


def test_spectrum_field_applicability():
    cfg = small_config()
    cfg["spectrum"]["omega_0"] = 5.0  # ohmic has no center frequency
    assert config_error(cfg).field == "spectrum.omega_0"

    cfg = small_config()
    cfg["spectrum"] = {"kind": "lorentzian", "alpha": 0.1, "omega_c": 1.0}
    assert config_error(cfg).field == "spectrum.omega_0"

    cfg = small_config()
    cfg["spectrum"] = {"kind": "tabulated", "alpha": 0.1,
                       "table": [[0.0, 0.0], [1.0, 1.0]]}
    assert config_error(cfg).field == "spectrum.alpha"

    cfg = small_config()
    cfg["spectrum"] = {"kind": "tabulated", "table": []}
    assert config_error(cfg).field == "spectrum.table"


def test_number_validation():
    cfg = small_config()
    cfg["spectrum"]["beta"] = -1.0
    assert config_error(cfg).field == "spectrum.beta"
    cfg = small_config()
    cfg["spectrum"]["alpha"] = "big"
    assert config_error(cfg).field == "spectrum.alpha"
    assert config_error(small_config(n_particles=0)).field == "n_particles"
    assert config_error(small_config(n_particles=True)).field == "n_particles"
    assert config_error(
        small_config(solver={"horizon_factor": 1.0})).field == "solver.horizon_factor"
    cfg = small_config(time_grid={"kind": "log", "start": 1.0, "stop": 0.5,
                                  "count": 5})
    assert config_error(cfg).field == "time_grid.stop"


# ---------------------------------------------------------------------------
# running scenarios


def test_run_report_only(tmp_path):
    out = str(tmp_path / "out")
    summary = run_scenario(validate_config(small_config()), output_dir=out)
    assert summary["files"] == ["report.json"]
    payload = json.loads((tmp_path / "out" / "report.json").read_text())
    assert payload["report"] == summary["report"]
    assert payload["report"]["convention_used"] == "twist"
    assert payload["report"]["feasible"] is True
    assert payload["spectrum"]["kind"] == "ohmic"


def test_run_is_deterministic(tmp_path):
    cfg = validate_config(small_config(
        outputs=["kernels", "snapshots", "report"],
        time_grid={"kind": "log", "start": 0.1, "stop": 1e5, "count": 11},
        snapshot_times={"kind": "tau-fractions", "values": [0.5, 1.0]},
        basis="Lx"))
    run_scenario(copy.deepcopy(cfg), output_dir=str(tmp_path / "a"))
    run_scenario(copy.deepcopy(cfg), output_dir=str(tmp_path / "b"))
    names = ["kernels.csv", "snapshot_000.csv", "snapshot_001.csv",
             "snapshots_index.json", "report.json"]
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == \
               (tmp_path / "b" / name).read_bytes()


def test_snapshot_grid_files(tmp_path):
    cfg = validate_config(small_config(
        outputs=["snapshots", "report"],
        snapshot_times={"kind": "tau-fractions", "values": [1.0]},
        basis="Lx"))
    run_scenario(cfg, output_dir=str(tmp_path))
    grid = np.loadtxt(tmp_path / "snapshot_000.csv", delimiter=",")
    assert grid.shape == (5, 5)  # N = 4 -> 2l+1 = 5
    assert np.all(grid >= 0.0)
    assert np.allclose(grid, grid.T, atol=1e-15)
    index = json.loads((tmp_path / "snapshots_index.json").read_text())
    entry = index["snapshots"][0]
    assert entry["file"] == "snapshot_000.csv"
    assert entry["basis"] == "Lx"
    assert entry["l"] == 2.0
    header = (tmp_path / "snapshot_000.csv").read_text().splitlines()[:4]
    assert header[0] == "# basis = Lx"
    assert header[1] == "# l = 2.0"
    assert header[2].startswith("# time = ")
    assert float(header[2].split("=")[1]) == entry["time"]


def test_absolute_snapshot_times_skip_formation_solve(tmp_path):
    # no formation time exists at this coupling, but absolute-time
    # snapshots must still be computable
    cfg = small_config(outputs=["snapshots"],
                       snapshot_times={"kind": "absolute", "values": [1.0, 2.0]})
    cfg["spectrum"]["alpha"] = 1e-30
    summary = run_scenario(validate_config(cfg), output_dir=str(tmp_path))
    assert summary["files"] == ["snapshot_000.csv", "snapshot_001.csv",
                                "snapshots_index.json"]
    assert summary["report"] is None


# ---------------------------------------------------------------------------
# sweeps


def read_csv(path):
    import csv

    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_single_point_sweep_matches_run(tmp_path):
    cfg = validate_config(small_config())
    summary = sweep(copy.deepcopy(cfg), "alpha", [2.5e-5], jobs=1,
                    output_dir=str(tmp_path / "sw"))
    assert summary["points"] == 1
    assert summary["failed"] == 0
    rows = read_csv(tmp_path / "sw" / "sweep.csv")
    assert rows[0] == ["alpha", "tau_mqs", "f_at_tau", "gamma_at_tau",
                       "fidelity", "corner", "purity", "feasible", "n_max",
                       "f_markov", "gamma_markov", "error"]
    run_report = run_scenario(cfg, output_dir=str(tmp_path / "run"))["report"]
    row = dict(zip(rows[0], rows[1]))
    assert float(row["tau_mqs"]) == run_report["tau_mqs"]
    assert float(row["fidelity"]) == run_report["fidelity"]
    assert int(row["n_max"]) == run_report["n_max"]
    assert row["feasible"] == "true"
    assert row["error"] == ""


def test_sweep_records_failures_and_continues(tmp_path):
    cfg = validate_config(small_config())
    summary = sweep(cfg, "alpha", [2.5e-5, 1e-30], jobs=1,
                    output_dir=str(tmp_path))
    assert summary["points"] == 2
    assert summary["failed"] == 1
    rows = read_csv(tmp_path / "sweep.csv")
    assert len(rows) == 3
    good = dict(zip(rows[0], rows[1]))
    bad = dict(zip(rows[0], rows[2]))
    assert good["error"] == ""
    assert bad["error"] != ""
    assert bad["tau_mqs"] == ""


def test_sweep_axis_validation(tmp_path):
    cfg = validate_config(small_config())
    with pytest.raises(ConfigError):
        sweep(cfg, "gamma", [1.0], output_dir=str(tmp_path))
    with pytest.raises(ConfigError):
        sweep(cfg, "alpha", [], output_dir=str(tmp_path))
    with pytest.raises(ConfigError):  # omega_0 needs a lorentzian spectrum
        sweep(cfg, "omega_0", [1.0], output_dir=str(tmp_path))
    summary = sweep(cfg, "N", [2.5], jobs=1, output_dir=str(tmp_path))
    assert summary["failed"] == 1  # non-integer N fails per point


def test_sweep_parallel_matches_serial(tmp_path):
    cfg = validate_config(small_config())
    values = [2, 4, 6, 40]
    sweep(copy.deepcopy(cfg), "N", values, jobs=1, output_dir=str(tmp_path / "s1"))
    sweep(copy.deepcopy(cfg), "N", values, jobs=4, output_dir=str(tmp_path / "s4"))
    assert (tmp_path / "s1" / "sweep.csv").read_bytes() == \
           (tmp_path / "s4" / "sweep.csv").read_bytes()


def test_sweep_n_feasibility_flip(tmp_path):
    cfg = validate_config(small_config())
    sweep(cfg, "N", [50, 100], jobs=1, output_dir=str(tmp_path))
    rows = read_csv(tmp_path / "sweep.csv")
    r50 = dict(zip(rows[0], rows[1]))
    r100 = dict(zip(rows[0], rows[2]))
    assert r50["feasible"] == "true"
    assert r100["feasible"] == "false"
    assert int(r50["n_max"]) == int(r100["n_max"]) == 60


# ---------------------------------------------------------------------------
# command line


def test_cli_run_success(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(small_config()))
    rc = main(["run", str(path), "--output-dir", str(tmp_path / "out")])
    captured = capsys.readouterr()
    assert rc == 0
    lines = [ln for ln in captured.out.splitlines() if ln.strip()]
    assert len(lines) == 1
    summary = json.loads(lines[0])
    assert summary["name"] == "small"
    assert summary["report"]["n_max"] == 60


def test_cli_run_preset_name(tmp_path, capsys):
    rc = main(["run", "phonon", "--output-dir", str(tmp_path)])
    captured = capsys.readouterr()
    assert rc == 0
    summary = json.loads(captured.out.strip())
    assert summary["name"] == "phonon"
    assert summary["report"]["feasible"] is True


def test_cli_missing_config_exits_2(capsys):
    rc = main(["run", "/nonexistent/nope.json"])
    captured = capsys.readouterr()
    assert rc == 2
    assert captured.err.startswith("error:")
    assert "preset" in captured.err


def test_cli_invalid_json_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    rc = main(["run", str(path)])
    captured = capsys.readouterr()
    assert rc == 2
    assert "not valid JSON" in captured.err


def test_cli_config_error_exits_2(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(small_config(basis="Ly")))
    rc = main(["run", str(path)])
    captured = capsys.readouterr()
    assert rc == 2
    assert "basis" in captured.err


def test_cli_numeric_failure_exits_3(tmp_path, capsys):
    cfg = small_config()
    cfg["spectrum"]["alpha"] = 1e-30
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    rc = main(["run", str(path), "--output-dir", str(tmp_path / "out")])
    captured = capsys.readouterr()
    assert rc == 3
    assert captured.err.startswith("numeric error in formation-time solve:")


def test_cli_presets_verb(capsys):
    rc = main(["presets"])
    captured = capsys.readouterr()
    assert rc == 0
    assert captured.out.split() == ["cavity", "fig1", "fig2", "phonon"]


def test_cli_emit_preset_round_trip(tmp_path, capsys):
    rc = main(["emit-preset", "fig1", "--output-dir", str(tmp_path)])
    captured = capsys.readouterr()
    assert rc == 0
    info = json.loads(captured.out.strip())
    emitted = json.loads((tmp_path / "fig1.json").read_text())
    assert info["path"].endswith("fig1.json")
    assert validate_config(emitted) == validate_config(preset_config("fig1"))


def test_cli_emit_preset_unknown_exits_2(capsys):
    rc = main(["emit-preset", "nope"])
    captured = capsys.readouterr()
    assert rc == 2
    assert captured.err.startswith("error:")


def test_cli_convention_override(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(small_config()))
    rc = main(["run", str(path), "--output-dir", str(tmp_path / "out"),
               "--mqs-convention", "antipodal"])
    captured = capsys.readouterr()
    assert rc == 0
    summary = json.loads(captured.out.strip())
    assert summary["report"]["convention_used"] == "antipodal"


def test_cli_sweep(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(small_config()))
    rc = main(["sweep", str(path), "--axis", "N", "--values", "2,4",
               "--jobs", "1", "--output-dir", str(tmp_path / "sw")])
    captured = capsys.readouterr()
    assert rc == 0
    summary = json.loads(captured.out.strip())
    assert summary["points"] == 2
    assert summary["failed"] == 0
    rows = read_csv(tmp_path / "sw" / "sweep.csv")
    assert [r[0] for r in rows] == ["N", "2", "4"]


def test_cli_sweep_bad_values_exit_2(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(small_config()))
    rc = main(["sweep", str(path), "--axis", "N", "--values", "2,x"])
    assert rc == 2
    assert "values" in capsys.readouterr().err
    rc = main(["sweep", str(path), "--axis", "N", "--values", "2",
               "--jobs", "0"])
    assert rc == 2


def test_sweep_axes_constant():
    assert SWEEP_AXES == ("N", "beta", "alpha", "omega_0")
