import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from saitohlab import cli
from saitohlab.weights import CFunction, product_field, single_domain_field
from saitohlab.geometry import Disc


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    status = cli.main([*argv, "--out", str(out)])
    return status, out


def report(out):
    return json.loads((out / "report.json").read_text())


def test_theorem_disc_equality(tmp_path, capsys):
    status, out = run(tmp_path, "theorem", "--id", "thm1.3")
    assert status == 0
    rep = report(out)["reports"][0]
    assert abs(rep["ratio"] - 1) < 1e-10 and rep["verdict"] == "equality"
    assert {p.name for p in out.iterdir()} == {"report.json", "metadata.json", "report.csv",
                                               "ratio.svg"}
    assert "thm1.3: ratio=" in capsys.readouterr().out


def test_verify_identity(tmp_path):
    status, out = run(tmp_path, "verify", "--identity", "3:E8", "--n", "2", "--samples", "3")
    assert status == 0
    ident = report(out)["identities"][0]
    assert ident["passed"] and ident["max_rel_err"] <= 1e-8
    rows = (out / "identities.csv").read_text().splitlines()
    assert rows[0].startswith("id,selector,max_rel_err") and rows[1].startswith("3:E8,M_U,")
    assert (out / "identities.svg").read_text().lstrip().startswith("<?xml")


def test_reports_are_deterministic(tmp_path):
    argv = ("theorem", "--id", "thm1.8", "--seed", "7", "--no-refine")
    _, a = run(tmp_path, *argv, name="a")
    _, b = run(tmp_path, *argv, name="b")
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
    assert (a / "ratio.svg").read_bytes() == (b / "ratio.svg").read_bytes()


def test_csv_columns(tmp_path):
    status, out = run(tmp_path, "sweep", "--axis", "p1", "--grid", "2", "3", "--format", "csv")
    assert status == 0
    rows = list(csv.reader((out / "report.csv").open()))
    assert rows[0] == ["parameter", "lhs", "rhs", "ratio", "refinement_delta"]
    assert [float(r[0]) for r in rows[1:]] == [2.0, 3.0]
    assert float(rows[2][3]) == pytest.approx(1.2, rel=1e-8)
    assert not (out / "ratio.svg").exists()


def test_sweep_svg_and_summary(tmp_path):
    status, out = run(tmp_path, "sweep", "--axis", "p0", "--grid", "1", "2", "--format", "svg",
                      "--format", "json")
    assert status == 0
    assert (out / "ratio.svg").read_text().lstrip().startswith("<?xml")
    sw = report(out)["sweep"]
    assert sw["id"] == "thm1.3" and sw["summary"]["trend"] == "nondecreasing"


@pytest.mark.parametrize("argv", [
    ("theorem",),
    ("sweep", "--id", "thm1.3"),
])
def test_missing_required_keys(tmp_path, argv, capsys):
    status, out = run(tmp_path, *argv)
    assert status == 2 and not out.exists()
    assert "error:" in capsys.readouterr().err


def test_unknown_config_key(tmp_path):
    conf = tmp_path / "run.json"
    conf.write_text(json.dumps({"command": "theorem", "id": "thm1.3", "colour": "red"}))
    status, out = run(tmp_path, "theorem", "--config", str(conf))
    assert status == 2 and not out.exists()


def test_malformed_config(tmp_path):
    conf = tmp_path / "run.json"
    conf.write_text("{not json")
    assert run(tmp_path, "theorem", "--config", str(conf))[0] == 2
    conf.write_text(json.dumps({"command": "theorem", "id": "thm1.3", "n": "two"}))
    assert run(tmp_path, "theorem", "--config", str(conf))[0] == 2
    conf.write_text(json.dumps({"command": "suite"}))
    assert run(tmp_path, "theorem", "--config", str(conf))[0] == 2


def test_hypothesis_failure_exits_two(tmp_path, capsys):
    status, out = run(tmp_path, "theorem", "--id", "thm1.8", "--p", "1.5", "1.5")
    assert status == 2 and not out.exists()
    assert "hypothesis failed" in capsys.readouterr().err


def test_numerical_failure_exits_three(tmp_path, monkeypatch, capsys):
    def broken(*args, **kw):
        raise np.linalg.LinAlgError("SVD did not converge")

    monkeypatch.setattr("saitohlab.saitoh._side_value", broken)
    status, out = run(tmp_path, "theorem", "--id", "thm1.3")
    assert status == 3 and not out.exists()
    assert "eval_theorem(thm1.3)" in capsys.readouterr().err


def test_violation_exits_one(tmp_path, monkeypatch):
    real = cli.eval_theorem

    def low(theorem, cfg, refine=True):
        rep = real(theorem, cfg, refine)
        rep.ratio, rep.verdict = 0.9, "violation-flag"
        return rep

    monkeypatch.setattr(cli, "eval_theorem", low)
    status, out = run(tmp_path, "theorem", "--id", "thm1.3", "--no-refine")
    assert status == 1
    assert report(out)["reports"][0]["verdict"] == "violation-flag"


def test_sweep_point_errors_exit_three(tmp_path):
    status, out = run(tmp_path, "sweep", "--axis", "r_inner", "--grid", "0.6", "0.9")
    assert status == 3
    sw = report(out)["sweep"]
    assert list(sw["errors"]) == ["0.9"] and sw["summary"]["points"] == 1


def test_config_file_with_weights(tmp_path):
    fld = single_domain_field(Disc(), 0.3j, 1.5, c=CFunction("exp_decay", 0.5))
    conf = tmp_path / "run.json"
    conf.write_text(json.dumps({"command": "theorem", "id": "thm1.3", "refine": False,
                                "weights": fld.to_dict()}))
    status, out = run(tmp_path, "theorem", "--config", str(conf))
    assert status == 0
    rep = report(out)["reports"][0]
    assert rep["constant_used"] == pytest.approx(np.pi / 1.5)
    # p0 = 1.5 exceeds the Lelong threshold of the point, so the bound is strict
    assert rep["verdict"] == "strict" and rep["ratio"] > 1


def test_flags_override_config(tmp_path):
    conf = tmp_path / "run.json"
    conf.write_text(json.dumps({"command": "theorem", "id": "thm1.3", "refine": False}))
    run(tmp_path, "theorem", "--config", str(conf), "--id", "thm1.2")
    assert report(tmp_path / "out")["reports"][0]["id"] == "thm1.2"


def test_jets_from_config(tmp_path):
    conf = tmp_path / "run.json"
    conf.write_text(json.dumps({"command": "theorem", "id": "thm1.9", "refine": False,
                                "jets": {"l": [[0, 1], [1]], "beta_tilde": [1, 0]}}))
    status, out = run(tmp_path, "theorem", "--config", str(conf))
    assert status == 0
    assert report(out)["reports"][0]["ratio"] == pytest.approx(1.0, abs=1e-8)


def test_kernel_command(tmp_path, capsys):
    status, out = run(tmp_path, "kernel", "--selector", "S", "--point", "0.5", "0",
                      "--basis", "30")
    assert status == 0
    k = report(out)["kernels"][0]
    assert k["value"] == pytest.approx(1 / 0.75, rel=1e-10)
    assert "S: K=" in capsys.readouterr().out
    assert (out / "kernels.csv").read_text().splitlines()[1].startswith("S,")
    assert not (out / "ratio.svg").exists()


def test_kernel_on_fibration(tmp_path):
    status, out = run(tmp_path, "kernel", "--selector", "dD_U")
    assert status == 0 and report(out)["kernels"][0]["value"] > 0


def test_product_field_through_config(tmp_path):
    fld = product_field([Disc(), Disc()], [0.2, -0.1j], (2.0, 2.0))
    conf = tmp_path / "run.json"
    conf.write_text(json.dumps({"command": "theorem", "id": "thm1.13",
                                "weights": fld.to_dict()}))
    status, out = run(tmp_path, "theorem", "--config", str(conf), "--format", "json")
    assert status == 0
    assert report(out)["reports"][0]["verdict"] == "equality"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "saitohlab", "--help"], capture_output=True,
                         text=True)
    assert res.returncode == 0 and "theorem" in res.stdout
