import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from opuc_zeros.cli import UsageError, main, parse_ns, read_config
from opuc_zeros.fit import CACHE_ENV, ExpansionFit
from opuc_zeros.intensity import DensityGrid
from opuc_zeros.mc import McStats
from opuc_zeros.special import a0_constant


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_a0(capsys):
    code, out, _ = run(capsys, "a0")
    rec = json.loads(out)
    assert code == 0
    assert rec["a0"] == pytest.approx(a0_constant(), abs=1e-12)
    assert 0 <= rec["err"] < 1e-10


def test_expect_degree_one(capsys):
    code, out, _ = run(capsys, "expect", "--measure", "lebesgue", "--n", "1")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and list(rows[0]) == ["n", "value", "err_est", "half1", "half2"]
    assert float(rows[0]["value"]) == pytest.approx(1.0, abs=1e-9)


def test_verblunsky_bernstein_szego(capsys):
    code, out, _ = run(capsys, "verblunsky", "--measure", "bernstein-szego:0.5", "--m", "4")
    alphas = json.loads(out)["alphas"]
    assert code == 0 and len(alphas) == 4
    assert alphas[0] == pytest.approx(0.5, abs=1e-10)
    assert np.all(np.abs(alphas[1:]) < 1e-10)


def test_density_roundtrip(capsys):
    code, out, _ = run(capsys, "density", "--measure", "geronimus:0.3", "--n", "6", "--grid", "9")
    grid = DensityGrid.from_csv(out)
    assert code == 0 and grid.xs.size == 9 and grid.n == 6
    assert np.all(grid.rho >= 0)


def test_mc_roundtrip_and_determinism(capsys):
    argv = ("mc", "--measure", "bernstein-szego:0.5", "--n", "10", "--samples", "500", "--seed", "4")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    stats = McStats.from_json(first)
    assert stats.samples_used == 500 and stats.seed == 4
    assert stats.to_json() + "\n" == first


def test_fit_roundtrip(capsys, tmp_path):
    cache = tmp_path / "c.jsonl"
    code, out, _ = run(capsys, "fit", "--ns", "16:256:geometric", "--order", "1",
                       "--cache", str(cache))
    assert code == 0
    fit = ExpansionFit.from_json(out)
    assert fit.order == 1 and [n for n, _ in fit.ladder] == [16, 32, 64, 128, 256]
    assert len(cache.read_text().splitlines()) == 5
    _, again, _ = run(capsys, "fit", "--ns", "16:256:geometric", "--order", "1",
                      "--cache", str(cache))
    assert again == out


def test_cache_env(capsys, tmp_path, monkeypatch):
    cache = tmp_path / "env.jsonl"
    monkeypatch.setenv(CACHE_ENV, str(cache))
    code, _, _ = run(capsys, "fit", "--ns", "4,8,16,32,64", "--order", "1")
    assert code == 0 and cache.exists()


def test_szego_json(capsys):
    code, out, _ = run(capsys, "szego", "--measure", "bernstein-szego:0.5", "--order", "2")
    rec = json.loads(out)
    assert code == 0
    s1 = rec["s"][0]
    assert rec["s"][1] == pytest.approx(s1 * (s1 + 1) / 2, abs=1e-8)


def test_out_file_and_config(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# ladder sweep\nmeasure = geronimus:0.3\nns = 4,8\ntol = 1e-9\n")
    out = tmp_path / "e.csv"
    code, stdout, _ = run(capsys, "expect", "--config", str(cfg), "--out", str(out))
    assert code == 0 and stdout == ""
    rows = list(csv.DictReader(out.open()))
    assert [int(r["n"]) for r in rows] == [4, 8]
    # flags win over the file
    code, stdout, _ = run(capsys, "expect", "--config", str(cfg), "--ns", "5")
    assert [int(r["n"]) for r in csv.DictReader(io.StringIO(stdout))] == [5]


def test_json_lines_for_expect(capsys):
    code, out, _ = run(capsys, "expect", "--ns", "2,3", "--format", "json")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 2
    assert [json.loads(s)["n"] for s in lines] == [2, 3]


@pytest.mark.parametrize("argv", [
    ("expect", "--measure", "geronimus:1.2", "--n", "3"),
    ("expect", "--n", "3", "--ns", "4,5"),
    ("expect", "--bogus"),
    ("mc", "--n", "4", "--samples", "0"),
    ("verblunsky", "--measure", "nosuch:1"),
    ("expect", "--measure", "lebesgue", "--measure", "lebesgue", "--n", "2"),
    ("universality", "--measure", "lebesgue"),
    ("expect", "--n", "3", "--tol", "1e-14"),
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert len(err.strip().splitlines()) == 1
    assert err.startswith("opuc-zeros: usage-error:")


def test_numerical_error(capsys, tmp_path):
    code, _, err = run(capsys, "fit", "--ns", "16,32", "--cache", str(tmp_path / "c.jsonl"))
    assert code == 3
    assert err.startswith("opuc-zeros: numerical-error:") and err.count("\n") == 1


def test_parse_ns():
    assert parse_ns("16:128:geometric") == [16, 32, 64, 128]
    assert parse_ns("3, 5,9") == [3, 5, 9]
    with pytest.raises(UsageError):
        parse_ns("1:8:linear")


def test_read_config(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("n = 4\n\n# comment\nmeasure=lebesgue\n")
    assert read_config(path) == {"n": "4", "measure": "lebesgue"}


def test_help_mentions_every_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["mc", "--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    for flag in ("--measure", "--n", "--ns", "--samples", "--seed", "--tol", "--order",
                 "--grid", "--out", "--format", "--config", "--im-tol"):
        assert flag in text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "opuc_zeros", "a0"], capture_output=True,
                          text=True, check=True)
    assert json.loads(proc.stdout)["a0"] == pytest.approx(a0_constant(), abs=1e-12)
