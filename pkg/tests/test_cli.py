import hashlib
import json

import pytest

from gabornct import __version__
from gabornct.cli import DEFAULTS, EXPERIMENTS, main, read_config, resolve_config, UsageError


def run_cli(tmp_path, *args, name="out"):
    out = tmp_path / name
    code = main(["run", *args, "--out", str(out)])
    return code, out


def load(out):
    return json.loads((out / "report.json").read_text())


def test_janssen_example(tmp_path):
    code, out = run_cli(tmp_path, "janssen", "--L", "64", "--a", "4", "--b", "4", "--window", "gaussian")
    assert code == 0
    rep = load(out)
    assert rep["kind"] == "janssen" and rep["version"] == __version__
    assert rep["results"]["rebuild_residual"] < 1e-10
    assert (out / "janssen.csv").read_text().startswith("k,l,re,im\n")


def test_frame_bounds_example(tmp_path):
    code, out = run_cli(tmp_path, "frame-bounds", "--L", "4", "--a", "2", "--b", "1", "--window", "boxcar2")
    assert code == 0
    bounds = load(out)["results"]["bounds"]
    assert bounds["A"] == pytest.approx(2) and bounds["B"] == pytest.approx(2)


def test_figa_example(tmp_path):
    code, out = run_cli(tmp_path, "figa-check", "--L", "8", "--a", "2", "--b", "4", "--seed", "7")
    assert code == 0
    assert load(out)["results"]["max_residual"] < 1e-12


@pytest.mark.parametrize("experiment", sorted(EXPERIMENTS))
def test_every_experiment_runs(tmp_path, experiment):
    code, out = run_cli(tmp_path, experiment, "--L", "16", "--a", "2", "--b", "4", "--jmax", "3", "--kmax", "3")
    assert code == 0
    rep = load(out)
    assert rep["kind"] == experiment
    assert "workers" not in rep["config"] and "out" not in rep["config"]
    assert len(list(out.glob("*.csv"))) >= 1


def test_radius_compare_irrational(tmp_path):
    code, out = run_cli(tmp_path, "radius-compare", "--theta", "golden", "--element", "harper")
    assert code == 0
    res = load(out)["results"]
    assert res["non_increasing"] and not res["representable"] and "r_op" not in res


def test_unknown_experiment_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["run", "nonsense"])
    assert info.value.code == 1


def test_bad_flag_value_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["run", "janssen", "--L", "many"])
    assert info.value.code == 1


def test_invalid_lattice_exit_code(tmp_path, capsys):
    code, _ = run_cli(tmp_path, "janssen", "--L", "10", "--a", "3")
    assert code == 2
    assert "must divide" in capsys.readouterr().err


def test_numerical_failure_exit_code(tmp_path):
    code, _ = run_cli(tmp_path, "dual-window", "--L", "4", "--a", "2", "--b", "1", "--window", "point_mass")
    assert code == 3


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# settings\nL = 16\na = 2\nb = 2\nwindow = hann4\n")
    code, out = run_cli(tmp_path, "frame-bounds", "--config", str(cfg), "--b", "4")
    assert code == 0
    conf = load(out)["config"]
    assert (conf["L"], conf["a"], conf["b"], conf["window"]) == (16, 2, 4, "hann4")


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    with pytest.raises(UsageError):
        read_config(bad)
    bad.write_text("just words\n")
    with pytest.raises(UsageError):
        read_config(bad)
    with pytest.raises(UsageError):
        resolve_config({"L": None}, {"L": "many"})
    assert main(["run", "janssen", "--config", str(tmp_path / "absent.cfg")]) == 1


def test_resolve_layers():
    cfg = resolve_config({"L": 32, "a": None}, {"L": "16", "a": "8"})
    assert cfg["L"] == 32 and cfg["a"] == 8 and cfg["b"] == DEFAULTS["b"]


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("NCT_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["run", "janssen", "--L", "16", "--a", "4", "--b", "4"]) == 0
    assert (tmp_path / "env" / "report.json").exists()


def digest(out):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(out.iterdir())}


@pytest.mark.parametrize("experiment", ["figa-check", "holo-calculus", "dual-window", "decay-profile"])
def test_reports_identical_across_workers(tmp_path, experiment):
    digests = []
    for w in (1, 2, 8):
        code, out = run_cli(tmp_path, experiment, "--L", "36", "--a", "3", "--b", "6", "--seed", "5", "--workers", str(w), name=f"w{w}")
        assert code == 0
        digests.append(digest(out))
    assert digests[0] == digests[1] == digests[2]
