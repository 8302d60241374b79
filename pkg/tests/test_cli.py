import datetime as dt
import json
import subprocess
import sys

import numpy as np
import pytest

from helpers import two_bar_days
from horncp.cli import main, read_series_file


def _write(path, text):
    path.write_text(text)
    return str(path)


def _csv_body(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# ")
    return json.loads(lines[0][2:]), lines[1:]


@pytest.fixture
def changed_series(tmp_path):
    rng = np.random.default_rng(5)
    x = rng.normal(size=80)
    x[40:] += 2.5
    body = "date,w\n" + "\n".join(
        f"{dt.date(2019, 1, 1) + dt.timedelta(days=i)},{v:.9g}" for i, v in enumerate(x))
    return _write(tmp_path / "w.csv", body)


def test_detect_json(changed_series, tmp_path):
    out = tmp_path / "est.json"
    assert main(["detect", "--input", changed_series, "--output", str(out)]) == 0
    est = json.loads(out.read_text())
    for key in ("r_mle", "r_hat", "delta_hat", "u_hat", "u_mle", "pi0", "sigma_used"):
        assert key in est
    assert est["r_hat"] in (0, est["r_mle"])
    assert len(est["u_hat"]) == 3


@pytest.mark.parametrize("score", ["cusum", "sn"])
def test_detect_alternative_scores(changed_series, tmp_path, score):
    out = tmp_path / "est.json"
    assert main(["detect", "--input", changed_series, "--score", score,
                 "--output", str(out)]) == 0
    assert json.loads(out.read_text())["score_kind"] in ("cusum", "self-normalized")


def test_detect_constant_series_fails(tmp_path, capsys):
    path = _write(tmp_path / "c.csv", "\n".join(["3.0"] * 10))
    assert main(["detect", "--input", path]) != 0
    assert "degenerate scale" in capsys.readouterr().err


def test_detect_bad_number(tmp_path, capsys):
    path = _write(tmp_path / "bad.csv", "w\n1.0\nfoo\n")
    assert main(["detect", "--input", path]) != 0
    assert "line 3" in capsys.readouterr().err


def test_read_series_formats(tmp_path):
    assert read_series_file(_write(tmp_path / "a.csv", "1\n2\n3\n")).n == 3
    assert read_series_file(_write(tmp_path / "b.csv", "value\n1\n2\n")).n == 2
    s = read_series_file(_write(tmp_path / "c.csv", "date,w\n2019-01-01,1\n2019-01-02,2\n"),
                         sigma=2.0)
    assert list(s.values) == [1.0, 2.0] and s.sigma == 2.0


def test_simulate_csv_and_json(tmp_path):
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--n", "50", "--r", "10", "25", "--delta", "0.5",
                 "--replicates", "300", "--output", str(out)]) == 0
    meta, lines = _csv_body(out)
    assert meta["seed"] == 20240601 and meta["r"] == [10, 25]
    assert lines[0].startswith("n,r,delta,t,mean_loss_mle")
    assert len(lines) == 3
    out = tmp_path / "sim.json"
    assert main(["simulate", "--n", "20", "--replicates", "1", "--format", "json",
                 "--output", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["rows"]) == 1 and doc["rows"][0]["zero_rate"] in (0.0, 1.0)


def test_table_ratio_column(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["table", "sn", "--n", "60", "--delta", "0.5", "--replicates", "300",
                 "--output", str(out)]) == 0
    meta, lines = _csv_body(out)
    assert meta["change_points"] == [10, 20, 30, 40, 50]
    assert lines[0] == "change_point,delta,baseline,proposed,ratio"
    for line in lines[1:]:
        _, _, base, prop, ratio = map(float, line.split(","))
        assert ratio == pytest.approx(prop / base, rel=1e-8)


def test_ingest(tmp_path, capsys):
    raw = _write(tmp_path / "raw.csv", "\n".join(two_bar_days(dt.date(2019, 1, 1), 400)))
    out = tmp_path / "w.csv"
    assert main(["ingest", "--input", raw, "--year", "2019", "--output", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "date,w" and len(lines) == 366
    assert lines[1].startswith("2019-01-01,")
    assert "dropped=0" in capsys.readouterr().err
    assert main(["ingest", "--input", raw, "--year", "2017"]) != 0


def test_ingest_malformed(tmp_path, capsys):
    lines = two_bar_days(dt.date(2019, 1, 1), 2)
    lines[2] = lines[2].replace(",BTC/USD,", ",BTC/USD,x")
    raw = _write(tmp_path / "raw.csv", "\n".join(lines))
    assert main(["ingest", "--input", raw]) != 0
    assert "line 3" in capsys.readouterr().err


def test_scatter(tmp_path):
    out = tmp_path / "s.csv"
    argv = ["scatter", "--n", "40", "--replicates", "200", "--output", str(out)]
    assert main(argv) == 0
    _, lines = _csv_body(out)
    assert lines[0] == "replicate,estimator,u1,u2,u3"
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 400
    assert any(r[1] == "proposed" and r[2:] == ["0", "0", "0"] for r in rows)
    first = out.read_bytes()
    assert main(argv) == 0
    assert out.read_bytes() == first


def test_bootstrap_and_zero_curve(changed_series, tmp_path):
    out = tmp_path / "b.json"
    assert main(["bootstrap", "--input", changed_series, "--replicates", "200",
                 "--output", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert {"risk_mle", "risk_proposed", "fit_mle", "fit_proposed"} <= set(doc)
    out = tmp_path / "z.csv"
    assert main(["zero-curve", "--sizes", "2", "50", "--replicates", "200",
                 "--output", str(out)]) == 0
    _, lines = _csv_body(out)
    assert lines[0] == "n,zero_rate" and len(lines) == 3


def test_module_entry_point(changed_series):
    proc = subprocess.run([sys.executable, "-m", "horncp", "detect", "--input", changed_series],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n"] == 80
