import csv
import json
import subprocess
import sys

import pytest

from etj import config
from etj.cli import main
from etj.config import ConfigError

FAST = ["--r-grid", "1,4,16", "--corpus", "abs-sin,sawtooth", "--k", "1"]


def run(*argv):
    return main(list(argv))


def test_parse_text_and_line_numbers():
    vals = config.parse_text("# comment\nbackend = periodic\n\np = inf  # trailing\n")
    assert vals["backend"] == "periodic" and vals["p"] == "inf"
    assert vals["_lines"]["p"] == 4
    with pytest.raises(ConfigError, match=":3:"):
        config.parse_text("p = 2\nk = 1\nnonsense\n")
    with pytest.raises(ConfigError, match="unknown key"):
        config.parse_text("colour = blue\n")


def test_r_grid_parsing():
    assert config.parse_r_grid("1:64:7") == [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0]
    assert config.parse_r_grid("0.5, 3") == [0.5, 3.0]
    for bad in ("1:2", "0:4:3", "a,b", "-1"):
        with pytest.raises(ConfigError):
            config.parse_r_grid(bad)


def test_build_validation():
    cfg = config.build({"p": "inf", "k": "1,2", "corpus": "sawtooth"})
    assert cfg.p == float("inf") and cfg.k_list == [1, 2]
    for bad in ({"backend": "torus"}, {"k": "0"}, {"k": "13"}, {"p": "0.5"},
                {"corpus": "nope"}, {"backend": "line", "r_grid": "0.5,2", "corpus": "bump"},
                {"kernel.kind": "fejer", "backend": "line", "corpus": "bump"}, {"seed": "-1"}):
        with pytest.raises(ConfigError):
            config.build(bad)


def test_bad_value_reports_line(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("backend = periodic\nk = one\n")
    assert run("jackson", "run", "--config", str(cfg)) == 2
    assert "line 2" in capsys.readouterr().err


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("p = 1\ncorpus = weierstrass\nout = ignored\n")
    out = tmp_path / "o"
    assert run("jackson", "run", "--config", str(cfg), "--p", "2", "--out", str(out), *FAST) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["p"] == 2.0
    assert summary["config"]["corpus"] == ["abs-sin", "sawtooth"]
    assert not (tmp_path / "ignored").exists()


def test_jackson_run_outputs(tmp_path):
    out = tmp_path / "o"
    assert run("jackson", "run", "--out", str(out), "--k", "1,2", "--r-grid", "1:64:7",
               "--corpus", "abs-sin,random-trig") == 0
    with open(out / "jackson.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2 * 2 * 7
    summary = json.loads((out / "summary.json").read_text())
    assert summary["verdict"] == "PASS"
    assert set(summary["kernels"]) == {"1", "2"}
    assert all(rep["verdict"] == "PASS" for rep in summary["reports"])


def test_json_format_and_derivatives(tmp_path):
    out = tmp_path / "o"
    assert run("jackson", "run", "--out", str(out), "--format", "json", "--m", "0,1",
               "--corpus", "random-trig", "--r-grid", "4,16,64") == 0
    rows = json.loads((out / "derivative.json").read_text())
    assert len(rows) == 2 * 3
    assert {row["m"] for row in rows} == {0, 1}


def test_rough_derivative_is_skipped(tmp_path):
    out = tmp_path / "o"
    assert run("jackson", "run", "--out", str(out), "--m", "2", "--corpus", "abs-sin",
               "--r-grid", "2,8") == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["skipped"][0]["verdict"] == "SKIP-domain"


def test_determinism(tmp_path, monkeypatch):
    outs = []
    for i, threads in enumerate(("1", "4")):
        monkeypatch.setenv("ETJ_THREADS", threads)
        out = tmp_path / f"o{i}"
        assert run("jackson", "run", "--out", str(out), "--seed", "42", *FAST[:2],
                   "--corpus", "random-trig,abs-sin", "--k", "1,2") == 0
        outs.append(out)
    for name in ("jackson.csv", "summary.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_report_merge(tmp_path):
    a, b, merged = tmp_path / "a", tmp_path / "b", tmp_path / "m"
    assert run("jackson", "run", "--out", str(a), *FAST) == 0
    assert run("jackson", "run", "--out", str(b), "--p", "inf", *FAST) == 0
    assert run("report", "merge", str(a), str(b), "--out", str(merged)) == 0
    with open(merged / "jackson.csv") as fh:
        assert len(list(csv.DictReader(fh))) == 2 * 2 * 3
    assert json.loads((merged / "summary.json").read_text())["verdict"] == "PASS"
    assert run("report", "merge", str(tmp_path / "missing"), "--out", str(merged)) == 3


def test_weight_check(tmp_path, capsys):
    cfg = tmp_path / "w.cfg"
    cfg.write_text("weight.kind = exp_power\nweight.beta_exp = 0.5\n")
    assert run("weight", "check", "--config", str(cfg)) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "admissible"
    capsys.readouterr()
    # Carleman weight of n!: sum M_n^(-1/n) diverges
    cfg.write_text("weight.kind = carleman\nweight.s = 1\n")
    assert run("weight", "check", "--config", str(cfg)) == 1
    assert json.loads(capsys.readouterr().out)["verdict"] != "admissible"


def test_kernel_build_and_inspect(tmp_path, capsys):
    cfg = tmp_path / "k.cfg"
    cfg.write_text("weight.kind = polynomial\nweight.M = 1\nweight.k = 3\n")
    assert run("kernel", "inspect", "--config", str(cfg)) == 0
    meta = json.loads(capsys.readouterr().out)
    assert len(meta["certification"]) == 3
    out = tmp_path / "kout"
    assert run("kernel", "build", "--config", str(cfg), "--out", str(out)) == 0
    assert (out / "kernel.csv").exists() and (out / "kernel.json").exists()


def test_line_backend_refuses_small_r(capsys):
    assert run("jackson", "run", "--backend", "line", "--corpus", "bump", "--r-grid", "0.5,2") == 2
    assert "r_min" in capsys.readouterr().err


def test_console_script_entry():
    res = subprocess.run([sys.executable, "-m", "etj", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "jackson" in res.stdout
