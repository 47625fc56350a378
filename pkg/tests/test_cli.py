"""Command line interface: exit codes, artifacts, config plumbing.

Everything drives cli.main(argv) in-process; the console script is the same
function. Each run gets its own tmp output directory and summary.json is
asserted to exist on failure paths too.
"""

import json

import numpy as np
import pytest

from inertia_lab import cli
from inertia_lab.presets import PRESETS, get_preset


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_cfg(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    with open(path, "w") as fh:
        json.dump(payload, fh)
    return str(path)


# ---------------------------------------------------------------- simulate

def test_simulate_preset_with_overrides(tmp_path):
    out = tmp_path / "out"
    code = cli.main(["simulate", "--preset", "avd3",
                     "--set", "horizon=30.0", "--out", str(out)])
    assert code == 0
    s = read_json(out / "summary.json")
    assert s["status"] == "completed"
    assert s["runs"][0]["status"] == "completed"
    assert s["runs"][0]["t_end"] == pytest.approx(30.0)
    header = (out / "trajectory.csv").read_text().splitlines()[0]
    assert header.startswith("t,x_1,x_2,v_1,v_2,fgap")


def test_simulate_is_byte_deterministic(tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert cli.main(["simulate", "--preset", "avd3",
                         "--set", "horizon=30.0", "--out", str(out)]) == 0
        outs.append((out / "trajectory.csv").read_bytes())
    assert outs[0] == outs[1]


def test_simulate_early_stop_exit_code(tmp_path):
    cfg = write_cfg(tmp_path, {"preset": "avd3", "horizon": 30.0,
                               "integrator": {"max_steps": 10}})
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", cfg, "--out", str(out)]) == 3
    s = read_json(out / "summary.json")
    assert s["status"] == "early_stop"
    assert s["runs"][0]["status"] == "max_steps_hit"


def test_simulate_config_merges_over_preset(tmp_path):
    cfg = write_cfg(tmp_path, {"preset": "avd3", "horizon": 25.0})
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    assert read_json(out / "summary.json")["runs"][0]["t_end"] == pytest.approx(25.0)


def test_set_path_must_exist(tmp_path):
    out = tmp_path / "out"
    # no 'integrator' block in the preset, so the intermediate key is missing
    code = cli.main(["simulate", "--preset", "avd3",
                     "--set", "integrator.max_steps=10", "--out", str(out)])
    assert code == 2
    assert read_json(out / "summary.json")["status"] == "config_error"


def test_unknown_schedule_key_is_config_error(tmp_path):
    out = tmp_path / "out"
    code = cli.main(["check", "--preset", "gamma-growth-critical",
                     "--set", "gamma.alfa=4.0", "--out", str(out)])
    assert code == 2
    s = read_json(out / "summary.json")
    assert s["status"] == "config_error"
    assert "alfa" in s["error"]


# ---------------------------------------------------------------- check

def test_check_exit_codes_track_the_verdict(tmp_path):
    runs = [("gamma-growth-critical", (), 5, "boundary"),
            ("gamma-growth-subcritical", (), 4, "violated"),
            ("gamma-growth-critical", ("--set", "gamma.alpha=4.0"), 0, "satisfied")]
    for i, (preset, extra, want_code, want_verdict) in enumerate(runs):
        out = tmp_path / f"out{i}"
        code = cli.main(["check", "--preset", preset, *extra, "--out", str(out)])
        assert code == want_code
        s = read_json(out / "summary.json")
        assert s["verdict"] == want_verdict
        assert s["status"] == "completed"
        header = (out / "margins.csv").read_text().splitlines()[0]
        assert header == "t,margin_growth"


def test_check_fast_growth_presets(tmp_path):
    out = tmp_path / "g"
    assert cli.main(["check", "--preset", "sec44-growth", "--out", str(out)]) == 4
    out = tmp_path / "h"
    assert cli.main(["check", "--preset", "sec44-h2plus", "--out", str(out)]) == 0
    s = read_json(out / "summary.json")
    assert s["condition_set"] == "H2plus"


# ---------------------------------------------------------------- rate

def test_rate_from_trajectory_csv(tmp_path):
    sim_out = tmp_path / "sim"
    assert cli.main(["simulate", "--preset", "avd3",
                     "--set", "horizon=50.0", "--out", str(sim_out)]) == 0
    cfg = write_cfg(tmp_path, {
        "trajectory_csv": str(sim_out / "trajectory.csv"),
        "claim": {"kind": "power", "s": 2.0, "window": [10.0, 50.0]}})
    out = tmp_path / "rate"
    assert cli.main(["rate", "--config", cfg, "--out", str(out)]) == 0
    s = read_json(out / "summary.json")
    assert s["verdict"] == "bounded"
    assert s["source"]["trajectory_csv"].endswith("trajectory.csv")
    assert read_json(out / "rate.json") == s


def test_rate_missing_csv_is_exit_six(tmp_path):
    cfg = write_cfg(tmp_path, {
        "trajectory_csv": str(tmp_path / "nope.csv"),
        "claim": {"kind": "power", "s": 2.0}})
    out = tmp_path / "out"
    assert cli.main(["rate", "--config", cfg, "--out", str(out)]) == 6
    assert read_json(out / "summary.json")["status"] == "missing_input"


def test_rate_csv_needs_fgap_column(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,x\n1.0,2.0\n2.0,1.0\n")
    cfg = write_cfg(tmp_path, {"trajectory_csv": str(bad),
                               "claim": {"kind": "power", "s": 2.0}})
    out = tmp_path / "out"
    assert cli.main(["rate", "--config", cfg, "--out", str(out)]) == 2


def test_rate_needs_exactly_one_source(tmp_path):
    both = write_cfg(tmp_path, {
        "trajectory_csv": "x.csv", "simulate": {},
        "claim": {"kind": "power", "s": 2.0}}, name="both.json")
    neither = write_cfg(tmp_path, {"claim": {"kind": "power", "s": 2.0}},
                        name="neither.json")
    assert cli.main(["rate", "--config", both, "--out", str(tmp_path / "a")]) == 2
    assert cli.main(["rate", "--config", neither, "--out", str(tmp_path / "b")]) == 2


def test_rate_inline_simulation_early_stop(tmp_path):
    cfg = write_cfg(tmp_path, {
        "preset": "avd3-rate",
        "simulate": {"horizon": 30.0, "integrator": {"max_steps": 10}}})
    out = tmp_path / "out"
    assert cli.main(["rate", "--config", cfg, "--out", str(out)]) == 3
    for name in ("summary.json", "rate.json"):
        s = read_json(out / name)
        assert s["status"] == "early_stop"
        assert s["verdict"] is None


def test_rate_fit_block(tmp_path):
    cfg = write_cfg(tmp_path, {
        "preset": "avd3-rate",
        "simulate": {"horizon": 60.0},
        "claim": {"window": [10.0, 60.0]},
        "fit": {"kind": "power"}})
    out = tmp_path / "out"
    assert cli.main(["rate", "--config", cfg, "--out", str(out)]) == 0
    s = read_json(out / "summary.json")
    assert s["verdict"] == "bounded"
    assert s["fitted_exponent"] is not None
    assert set(s["fit"]) == {"exponent", "residual", "n_used"}
    assert s["fit"]["exponent"] > 1.5      # decays at least about quadratically


# ---------------------------------------------------------------- ip

def test_ip_outputs(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["ip", "--preset", "ip-prox", "--set", "K=40",
                     "--out", str(out)]) == 0
    s = read_json(out / "summary.json")
    assert s["status"] == "completed"
    assert s["K"] == 40
    data = np.genfromtxt(out / "iterates.csv", delimiter=",", names=True)
    assert data.shape == (41,)
    assert np.all(np.diff(data["fgap"]) <= 0.0)


def test_out_directory_from_config(tmp_path):
    dest = tmp_path / "from_cfg"
    cfg = write_cfg(tmp_path, {"preset": "ip-prox", "K": 20, "out": str(dest)})
    assert cli.main(["ip", "--config", cfg]) == 0
    assert (dest / "iterates.csv").exists()
    assert (dest / "summary.json").exists()


# ---------------------------------------------------------------- sweep

def sweep_base():
    return {
        "condition_set": "GammaGrowth",
        "gamma": {"family": "alpha-over-t-power", "alpha": 3.0},
        "beta": {"family": "constant", "k": 0.0},
        "b": {"family": "constant", "k": 1.0},
        "grid": {"t0": 1.0, "t_end": 100.0, "n": 50},
    }


def test_sweep_fans_out_and_aggregates(tmp_path):
    cfg = write_cfg(tmp_path, {"command": "check", "base": sweep_base(),
                               "grid": {"gamma.alpha": [2.0, 3.0, 4.0]}})
    out = tmp_path / "out"
    code = cli.main(["sweep", "--config", cfg, "--out", str(out), "--jobs", "2"])
    assert code == 5                      # max over {violated, boundary, ok}
    s = read_json(out / "summary.json")
    assert s["n_points"] == 3
    assert s["exit_codes"] == [4, 5, 0]
    lines = (out / "index.csv").read_text().splitlines()
    assert lines[0] == "dir,gamma.alpha,exit_code"
    assert lines[1] == "pt_0000,2,4"
    assert lines[3] == "pt_0002,4,0"
    for i in range(3):
        assert (out / f"pt_{i:04d}" / "summary.json").exists()


def test_sweep_point_config_errors_are_contained(tmp_path):
    cfg = write_cfg(tmp_path, {"command": "check", "base": sweep_base(),
                               "grid": {"gamma.alfa": [1.0, 2.0]}})
    out = tmp_path / "out"
    assert cli.main(["sweep", "--config", cfg, "--out", str(out)]) == 2
    assert read_json(out / "summary.json")["exit_codes"] == [2, 2]
    assert read_json(out / "pt_0000" / "summary.json")["status"] == "config_error"


def test_sweep_base_may_reference_a_preset(tmp_path):
    cfg = write_cfg(tmp_path, {
        "command": "check",
        "base": {"preset": "gamma-growth-critical",
                 "grid": {"t0": 1.0, "t_end": 100.0, "n": 50}},
        "grid": {"gamma.alpha": [2.0, 4.0]},
    })
    out = tmp_path / "out"
    assert cli.main(["sweep", "--config", cfg, "--out", str(out)]) == 4
    assert read_json(out / "summary.json")["exit_codes"] == [4, 0]
    lines = (out / "index.csv").read_text().splitlines()
    assert lines[0] == "dir,gamma.alpha,exit_code"


def test_sweep_validation(tmp_path):
    bad = [{"command": "sweep", "base": {}, "grid": {"a": [1]}},
           {"command": "check", "base": sweep_base(), "grid": {}},
           {"command": "check", "base": sweep_base(), "grid": {"gamma.alpha": 3.0}},
           {"command": "check", "base": 7, "grid": {"gamma.alpha": [3.0]}},
           {"command": "check", "base": {"preset": "ip-nesterov"},
            "grid": {"gamma.alpha": [3.0]}}]
    for i, payload in enumerate(bad):
        cfg = write_cfg(tmp_path, payload, name=f"bad{i}.json")
        out = tmp_path / f"out{i}"
        assert cli.main(["sweep", "--config", cfg, "--out", str(out)]) == 2


# ---------------------------------------------------------------- config plumbing

def test_unknown_preset_and_command_mismatch(tmp_path):
    out = tmp_path / "a"
    assert cli.main(["simulate", "--preset", "nope", "--out", str(out)]) == 2
    s = read_json(out / "summary.json")
    assert s["status"] == "config_error" and "nope" in s["error"]
    out = tmp_path / "b"
    assert cli.main(["simulate", "--preset", "gamma-growth-critical",
                     "--out", str(out)]) == 2


def test_config_or_preset_is_required(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["simulate", "--out", str(out)]) == 2


def test_invalid_json_config(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", str(path), "--out", str(out)]) == 2


def test_missing_config_file(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", str(tmp_path / "gone.json"),
                     "--out", str(out)]) == 6
    assert read_json(out / "summary.json")["status"] == "missing_input"


def test_help_documents_reserved_seed_variable():
    assert "INERTIA_LAB_SEED" in cli._make_parser().format_help()


def test_preset_catalog_is_stable():
    assert set(PRESETS) == {
        "avd3", "avd4", "gamma-hessian", "cor1.6-sim", "prop-jordan-sim",
        "convlin-sim", "thm6.4-sim", "oscillation-beta0", "oscillation-beta1",
        "fig1", "fig2",
        "gamma-growth-critical", "gamma-growth-subcritical", "sec44-growth",
        "sec44-h2plus", "eq61-critical",
        "avd3-rate", "cor1.6", "prop-jordan", "convlin", "thm6.4",
        "ip-nesterov", "ip-prox", "ip-largestep",
    }


def test_dense_preset_loads_without_running():
    cmd, cfg = get_preset("fig2")
    assert cmd == "simulate"
    runs = cfg["runs"]
    assert len(runs) == 16
    labels = [r["label"] for r in runs]
    assert len(set(labels)) == 16
    # rank-one objective with Hessian damping is stiff for an explicit
    # stepper; the preset carries an enlarged step budget
    assert all(r["integrator"]["max_steps"] == 60_000_000 for r in runs)


def test_curated_multirun_preset_executes(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["simulate", "--preset", "fig1", "--out", str(out)]) == 0
    csvs = sorted(out.glob("trajectory_*.csv"))
    assert len(csvs) == 17
    assert (out / "plot.gp").exists()
    s = read_json(out / "summary.json")
    assert len(s["runs"]) == 17
    assert {r["status"] for r in s["runs"]} == {"completed"}
