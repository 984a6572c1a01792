import io
import json
import math

import numpy as np
import pytest

from esscirc.cli import main, parse_grid
from esscirc.datasets import find_termite_file


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


MODEL = ["--family", "wc", "--conc", "0.8", "--lambda", "0.5", "--m", "1"]


def test_density_csv():
    code, text = run("density", *MODEL, "--grid", "256")
    lines = text.strip().splitlines()
    assert code == 0 and lines[0] == "theta,density" and len(lines) == 257
    vals = np.array([[float(v) for v in l.split(",")] for l in lines[1:]])
    assert 2 * math.pi * vals[:, 1].mean() == pytest.approx(1.0, abs=1e-6)


def test_moments_json():
    code, text = run("moments", *MODEL, "--p", "1")
    d = json.loads(text)
    assert code == 0
    assert d["beta"] == pytest.approx(0.1283625, abs=1e-9)
    assert set(d) >= {"alpha", "beta", "md", "mrl", "skewness"}


def test_skew_range_row():
    code, text = run("skew-range", "--m", "0")
    row = text.strip().splitlines()[1].split(",")
    assert code == 0 and float(row[2]) == pytest.approx(0.58753, abs=1e-4)
    assert len(row[2].replace("-", "").replace(".", "")) >= 6


def test_sample_deterministic():
    a = run("sample", *MODEL, "--n", "5", "--seed", "7")[1]
    b = run("sample", *MODEL, "--n", "5", "--seed", "7")[1]
    assert a == b and len(a.splitlines()) == 5


def test_sample_fit_round_trip(tmp_path):
    truth = {"mu": 0.4, "conc": 2.0, "lam": -0.6}
    f = tmp_path / "draws.txt"
    _, text = run("sample", "--family", "vm", "--mu", "0.4", "--conc", "2", "--lambda", "-0.6", "--m", "2", "--n", "2000", "--seed", "3")
    f.write_text(text)
    code, out = run("fit", "--data", str(f), "--family", "vm", "--m", "2")
    d = json.loads(out)
    assert code == 0
    est = [d["mu"] - truth["mu"], d["concentration"] - truth["conc"], d["lam"] - truth["lam"]]
    assert all(abs(e) < 3 * s for e, s in zip(est, d["se"]))
    assert d["aic"] == pytest.approx(-2 * d["loglik_total"] + 6)


def test_select_and_symmetry(tmp_path):
    f = tmp_path / "d.txt"
    f.write_text(run("sample", *MODEL, "--n", "150", "--seed", "1")[1])
    code, out = run("select", "--data", str(f), "--family", "wc", "--m-grid", "0..2")
    d = json.loads(out)
    assert code == 0 and [r["m"] for r in d["table"]] == [0, 1, 2]
    code, out = run("symmetry", "--data", str(f))
    assert code == 0 and 0 <= json.loads(out)["p_value"] <= 1


def test_simulate(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[campaign]\nfamily = wc\nconcentration = 0.8\ntrue_m = 0\nlambdas = 0.5\nn_grid = 50\nreplicates = 3\nm_grid = 0..1\n")
    code, out = run("simulate", "--config", str(cfg), "--out", str(tmp_path / "o"), "--workers", "1")
    assert code == 0
    assert (tmp_path / "o" / "c_estimates.csv").exists()


def test_errors_exit_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("0.1\nfoo\n")
    code, _ = run("fit", "--data", str(bad), "--family", "wc")
    assert code == 1 and "bad.txt:2" in capsys.readouterr().err
    assert run("density", "--family", "wc", "--conc", "1.5")[0] == 1
    with pytest.raises(SystemExit) as exc:
        run("fit", "--family", "wc", "--bogus")
    assert exc.value.code == 2


def test_parse_grid():
    assert parse_grid("0..4") == (0, 1, 2, 3, 4)
    assert parse_grid("0,2, 3") == (0, 2, 3)


@pytest.mark.skipif(find_termite_file() is None, reason="termite data not available")
def test_fit_termite_dataset1():
    code, out = run("fit", "--termite", "1", "--family", "wc", "--m", "0")
    assert code == 0 and json.loads(out)["aic"] == pytest.approx(35.34, abs=0.05)
