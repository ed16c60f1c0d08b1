import json
import subprocess
import sys

import pytest

from toeplitz_triples import cli
from toeplitz_triples.cli import EXPERIMENTS, bundled_scenario, main
from toeplitz_triples.reports import BoundReport


def _scenario(tmp_path, scn):
    path = tmp_path / "scn.json"
    path.write_text(json.dumps(scn))
    return str(path)


def _small(**over):
    scn = {
        "name": "small",
        "instance": {"kind": "circle", "n_max": 2},
        "params": [[1.0, 1.0], [0.5, 1.0]],
        "states": {"deltas": [0.0, 3.141592653589793], "random": 1},
        "solver": {"restarts": 2, "seed": 0},
        "experiments": [{"type": "seminorm", "samples": 3}, {"type": "trace-identity", "s": [1, 2]}],
    }
    scn.update(over)
    return scn


def test_list_experiments(capsys):
    assert main(["--list-experiments"]) == 0
    out = capsys.readouterr().out
    for name in EXPERIMENTS:
        assert name in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "toeplitz_triples", "--list-experiments"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "sweep" in res.stdout


def test_missing_scenario_flag(capsys):
    assert main([]) == 2
    assert main(["--scenario", "/nonexistent/file.json"]) == 2


def test_parameter_violation_exits_2(tmp_path, capsys):
    path = _scenario(tmp_path, _small(params=[[2.0, 1.0]]))
    assert main(["--scenario", path, "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "alpha*beta <= 1" in err and "params[0]" in err


def test_schema_violation_names_field(tmp_path, capsys):
    scn = _small()
    scn["instance"] = {"kind": "circle", "n_max": "four"}
    assert main(["--scenario", _scenario(tmp_path, scn), "--out", str(tmp_path)]) == 2
    assert "instance" in capsys.readouterr().err


def test_too_large_needs_flag(tmp_path, capsys):
    scn = _small(instance={"kind": "circle", "n_max": 150}, experiments=[{"type": "trace-identity", "s": [2]}])
    path = _scenario(tmp_path, scn)
    assert main(["--scenario", path, "--out", str(tmp_path)]) == 2
    assert "--allow-large" in capsys.readouterr().err
    assert main(["--scenario", path, "--out", str(tmp_path), "--allow-large"]) == 0


def test_report_shape(tmp_path):
    path = _scenario(tmp_path, _small())
    assert main(["--scenario", path, "--out", str(tmp_path), "--seed", "3"]) == 0
    rep = json.loads((tmp_path / "small-report.json").read_text())
    assert rep["seed"] == 3 and len(rep["scenario_hash"]) == 64
    for r in rep["results"]:
        assert set(r) >= {"name", "anchor", "lhs", "rhs", "slack", "pass", "context", "experiment"}
        assert r["anchor"]


def test_tolerance_scale_multiplies(tmp_path):
    path = _scenario(tmp_path, _small())
    main(["--scenario", path, "--out", str(tmp_path / "a")])
    main(["--scenario", path, "--out", str(tmp_path / "b"), "--tolerance-scale", "10"])
    ra = json.loads((tmp_path / "a" / "small-report.json").read_text())["results"]
    rb = json.loads((tmp_path / "b" / "small-report.json").read_text())["results"]
    for x, y in zip(ra, rb):
        assert y["context"]["tolerance"] == pytest.approx(10 * x["context"]["tolerance"])


def test_nonpositive_tolerance_scale(tmp_path):
    path = _scenario(tmp_path, _small())
    assert main(["--scenario", path, "--out", str(tmp_path), "--tolerance-scale=0"]) == 2


def test_failing_check_exits_1(tmp_path, capsys, monkeypatch):
    def broken(*args, **kw):
        return [BoundReport("forced failure", 2.0, 1.0, 1e-9, "test-anchor")]

    monkeypatch.setattr(cli, "_exp_trace", broken)
    path = _scenario(tmp_path, _small(experiments=[{"type": "trace-identity", "s": [1]}]))
    assert main(["--scenario", path, "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "forced failure" in err and "slack -1.0" in err


def test_same_seed_is_byte_identical(tmp_path):
    path = _scenario(tmp_path, _small())
    main(["--scenario", path, "--out", str(tmp_path / "a"), "--seed", "7"])
    main(["--scenario", path, "--out", str(tmp_path / "b"), "--seed", "7"])
    a = (tmp_path / "a" / "small-report.json").read_bytes()
    b = (tmp_path / "b" / "small-report.json").read_bytes()
    assert a == b


def test_bundled_compacts_scenario(tmp_path):
    with bundled_scenario("compacts-axioms").open() as fh:
        scn = json.load(fh)
    path = _scenario(tmp_path, scn)
    assert main(["--scenario", path, "--out", str(tmp_path)]) == 0
