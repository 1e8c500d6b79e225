"""End-to-end checks for the command line interface.

Every test drives ``main`` in process with an explicit argv, so the suite
exercises argument parsing, config-file merging, report emission, and the
exit-code contract (0 done, 2 invalid input, 3 numerical failure) without
spawning subprocesses.
"""

import json

import numpy as np
import pytest

from semireg import zoo
from semireg.cli import main, read_matrix_file, write_matrix_file
from semireg.errors import BadParams

BEURLING_SMALL = ["beurling", "--zoo", "diag_ray", "--dim", "8",
                  "--decades", "2", "--points-per-decade", "4"]

SMOKE_ARGVS = {
    "beurling": BEURLING_SMALL,
    "sector": ["sector", "--zoo", "diag_ray", "--dim", "8",
               "--zeta", "[-1,0]", "--t0", "1.0", "--alpha-points", "4"],
    "rbound": ["rbound", "--zoo", "diag_ray", "--dim", "8",
               "--mode", "exact", "--budget", "2"],
    "r-beurling": ["r-beurling", "--zoo", "diag_ray", "--dim", "8",
                   "--decades", "2", "--points-per-decade", "4",
                   "--mode", "exact", "--budget", "2"],
    "cosine": ["cosine", "--zoo", "tridiag_laplacian", "--dim", "8",
               "--pairs", "3", "--lam", "1.0"],
    "zero-two": ["zero-two", "--zoo", "skew_diag", "--dims", "[8,16]"],
    "fattorini": ["fattorini", "--zoo", "tridiag_laplacian", "--dim", "8",
                  "--omega", "0.5", "--n-max", "4", "--t", "0.8",
                  "--nodes", "64"],
    "interpolate": ["interpolate", "--zoo", "heat_conv", "--dim", "8",
                    "--p1", "2", "--p2", "inf", "--theta", "0.5",
                    "--trials", "20", "--decades", "2",
                    "--points-per-decade", "4"],
    "extrapolate": ["extrapolate", "--zoo", "heat_conv", "--dim", "8",
                    "--poly", "[-1,1]", "--p1", "2", "--p2", "inf",
                    "--p-target", "4", "--n-range", "[1,2]",
                    "--decades", "2", "--points-per-decade", "4"],
    "gaussian": ["gaussian", "--points", "32", "--period", "20",
                 "--t-list", "[0.2,0.4]", "--trials", "4"],
    "maxreg": ["maxreg", "--zoo", "tridiag_laplacian", "--dim", "16",
               "--tau-list", "[0.25]"],
    "zoo": ["zoo", "list"],
}


def run_json(argv, tmp_path, name="report.json"):
    out = tmp_path / name
    rc = main(list(argv) + ["--out", str(out)])
    assert rc == 0
    with open(out) as fh:
        return json.load(fh)


def comparable(report):
    """Strip the fields that legitimately vary between identical runs."""
    report = dict(report)
    report.pop("wall_time_s")
    config = dict(report["config"])
    config.pop("out", None)
    report["config"] = config
    return report


# ------------------------------------------------------------ envelope

def test_report_envelope(tmp_path):
    rep = run_json(BEURLING_SMALL, tmp_path)
    assert sorted(rep) == ["command", "config", "results", "tolerances",
                           "wall_time_s"]
    assert rep["command"] == "beurling"
    assert rep["config"]["dim"] == 8
    assert rep["config"]["seed"] == 0
    assert rep["config"]["format"] == "json"
    assert isinstance(rep["wall_time_s"], float)
    assert rep["wall_time_s"] >= 0.0


def test_report_pins_tolerances(tmp_path):
    tol = run_json(BEURLING_SMALL, tmp_path)["tolerances"]
    assert tol["dalembert"] == 1e-8
    assert tol["zero_two_high"] == 1.95
    assert tol["zero_two_low"] == 0.05
    assert tol["mc_se_rel"] == 0.02
    assert tol["bt_pole_distance"] == 1e-3


def test_stdout_json_when_no_out(capsys):
    rc = main(BEURLING_SMALL)
    assert rc == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["command"] == "beurling"
    assert len(rep["results"]["t"]) == 9


def test_out_file_note_on_stdout(tmp_path, capsys):
    out = tmp_path / "rep.json"
    assert main(BEURLING_SMALL + ["--out", str(out)]) == 0
    assert f"wrote json report to {out}" in capsys.readouterr().out


# ----------------------------------------------------------- csv output

def test_csv_inferred_from_suffix(tmp_path):
    out = tmp_path / "rep.csv"
    assert main(BEURLING_SMALL + ["--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,value"
    assert len(lines) == 1 + 9
    first = lines[1].split(",")
    assert float(first[0]) == 1.0
    assert float(first[1]) >= 0.0


def test_csv_format_flag_on_stdout(capsys):
    rc = main(SMOKE_ARGVS["sector"] + ["--format", "csv"])
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "alpha,resolvent_sup,bound,admissible"
    assert len(lines) == 1 + 8
    assert lines[1].split(",")[3] in ("True", "False")


# ------------------------------------------------------- command smokes

@pytest.mark.parametrize("name", sorted(SMOKE_ARGVS))
def test_command_smoke(name, tmp_path):
    rep = run_json(SMOKE_ARGVS[name], tmp_path)
    assert rep["command"] == name
    assert isinstance(rep["results"], dict)
    assert rep["results"]


def test_beurling_results_shape(tmp_path):
    res = run_json(BEURLING_SMALL, tmp_path)["results"]
    assert len(res["t"]) == 9
    assert len(res["values"]) == 9
    assert res["t"][0] == 1.0
    assert res["disc_value"] == pytest.approx(2.0)
    assert res["verdict"] in ("separated", "not_separated")
    assert res["estimate"] in ("lower_bound", "exact")


def test_interpolate_from_target_echo(tmp_path):
    argv = ["interpolate", "--zoo", "heat_conv", "--dim", "8",
            "--p1", "2", "--p2", "inf", "--p-target", "4",
            "--trials", "10", "--decades", "2", "--points-per-decade", "4"]
    rep = run_json(argv, tmp_path)
    assert rep["config"]["theta"] == pytest.approx(0.5)
    assert rep["results"]["p"] == pytest.approx(4.0)
    assert rep["results"]["ok"] is True


def test_extrapolate_results_shape(tmp_path):
    res = run_json(SMOKE_ARGVS["extrapolate"], tmp_path)["results"]
    assert res["status"] == "ok"
    assert 0.0 < res["rho"] < 1.0
    assert res["all_bounds_hold"] is True
    assert isinstance(res["smallest_passing_n"], int)
    assert res["smallest_passing_n"] >= 1


# ------------------------------------------------------------------ zoo

def test_zoo_list_entries(tmp_path):
    res = run_json(["zoo", "list"], tmp_path)["results"]
    names = [e["name"] for e in res["entries"]]
    assert names == list(zoo.entry_names())
    by_name = {e["name"]: e for e in res["entries"]}
    assert by_name["skew_diag"]["expected"] == "not_holomorphic_in_limit"
    assert by_name["mult_symbol"]["expected"] == "unknown"
    assert all(e["notes"] for e in res["entries"])


def test_zoo_build_writes_matrix(tmp_path, capsys):
    out = tmp_path / "jordan.mat"
    rc = main(["zoo", "build", "--zoo", "jordan", "--dim", "8",
               "--out", str(out)])
    assert rc == 0
    assert f"wrote matrix file {out}" in capsys.readouterr().out
    M = read_matrix_file(str(out))
    assert np.array_equal(M, zoo.build("jordan", 8).matrix)


def test_zoo_build_needs_name_and_out(tmp_path):
    assert main(["zoo", "build", "--dim", "8",
                 "--out", str(tmp_path / "m.mat")]) == 2
    assert main(["zoo", "build", "--zoo", "jordan", "--dim", "8"]) == 2


# ----------------------------------------------------------- matrix io

def test_matrix_file_round_trip(tmp_path):
    rng = np.random.default_rng(11)
    M = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    path = tmp_path / "m.mat"
    write_matrix_file(str(path), M)
    assert np.array_equal(read_matrix_file(str(path)), M)


def test_matrix_file_rejects_bad_contents(tmp_path):
    short = tmp_path / "short.mat"
    short.write_text("2\n1.0 0.0 2.0 0.0\n")
    with pytest.raises(BadParams):
        read_matrix_file(str(short))
    empty = tmp_path / "empty.mat"
    empty.write_text("")
    with pytest.raises(BadParams):
        read_matrix_file(str(empty))
    with pytest.raises(BadParams):
        read_matrix_file(str(tmp_path / "missing.mat"))


def test_matrix_file_as_generator(tmp_path):
    path = tmp_path / "gen.mat"
    write_matrix_file(str(path), -np.eye(3, dtype=complex))
    rep = run_json(["beurling", "--matrix-file", str(path),
                    "--decades", "2", "--points-per-decade", "4"], tmp_path)
    assert rep["config"]["dim"] == 3
    assert rep["command"] == "beurling"


# -------------------------------------------------------- config files

def test_config_file_fills_defaults_flags_win(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(
        {"zoo": "diag_ray", "dim": 16, "seed": 3, "t_max": 2.0,
         "decades": 2.0, "points_per_decade": 4}))
    rep = run_json(["beurling", "--config", str(cfg), "--dim", "8"], tmp_path)
    assert rep["config"]["dim"] == 8
    assert rep["config"]["seed"] == 3
    assert rep["config"]["t_max"] == 2.0
    assert rep["results"]["t"][0] == 2.0


def test_config_file_must_be_object(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("[1, 2, 3]")
    assert main(["beurling", "--config", str(cfg)]) == 2


def test_config_file_missing(tmp_path):
    assert main(["beurling", "--zoo", "diag_ray",
                 "--config", str(tmp_path / "nope.json")]) == 2


def test_param_flag_reaches_builder(tmp_path):
    rep = run_json(BEURLING_SMALL + ["--param", "phi=1.0"], tmp_path)
    assert rep["config"]["param"] == {"phi": 1.0}


def test_param_flag_requires_key_value(tmp_path):
    assert main(BEURLING_SMALL + ["--param", "phi"]) == 2


# ------------------------------------------------------------ exit codes

@pytest.mark.parametrize("argv", [
    ["zero-two"],
    ["beurling", "--zoo", "diag_ray", "--dim", "8", "--poly", "[]"],
    ["beurling", "--zoo", "not_a_name", "--dim", "8"],
    ["beurling", "--dim", "8"],
    ["rbound", "--zoo", "diag_ray", "--dim", "8",
     "--mode", "exact", "--exact-cap", "0"],
    ["sector", "--zoo", "diag_ray", "--dim", "8", "--zeta", "[0.5,0]"],
], ids=["no-zoo", "empty-poly", "unknown-zoo", "no-generator",
        "bad-exact-cap", "zeta-inside-disc"])
def test_invalid_input_exits_two(argv, capsys):
    assert main(argv) == 2
    assert "invalid input" in capsys.readouterr().err


def test_periodization_failure_exits_three(capsys):
    rc = main(["gaussian", "--points", "8", "--period", "8",
               "--t-list", "[0.5]"])
    assert rc == 3
    assert "numerical failure" in capsys.readouterr().err


def test_series_divergence_exits_three(tmp_path, capsys):
    path = tmp_path / "one.mat"
    write_matrix_file(str(path), np.array([[1.0 + 0.0j]]))
    rc = main(["fattorini", "--matrix-file", str(path),
               "--omega", "6.0", "--n-max", "2", "--t", "1.0"])
    assert rc == 3
    assert "numerical failure" in capsys.readouterr().err


def test_unknown_command_rejected():
    with pytest.raises(SystemExit) as excinfo:
        main(["frobnicate"])
    assert excinfo.value.code == 2


# ----------------------------------------------------------- determinism

def test_rbound_report_is_deterministic(tmp_path):
    first = run_json(SMOKE_ARGVS["rbound"], tmp_path, "a.json")
    second = run_json(SMOKE_ARGVS["rbound"], tmp_path, "b.json")
    assert comparable(first) == comparable(second)


def test_gaussian_report_is_deterministic(tmp_path):
    argv = SMOKE_ARGVS["gaussian"] + ["--seed", "1"]
    first = run_json(argv, tmp_path, "a.json")
    second = run_json(argv, tmp_path, "b.json")
    assert comparable(first) == comparable(second)


def test_weights_file_matches_unit_space(tmp_path):
    wpath = tmp_path / "w.txt"
    np.savetxt(wpath, np.ones(8))
    base = run_json(BEURLING_SMALL, tmp_path, "a.json")
    weighted = run_json(BEURLING_SMALL + ["--weights", str(wpath)],
                        tmp_path, "b.json")
    assert weighted["results"] == base["results"]
