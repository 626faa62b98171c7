import math
import subprocess
import sys

import pytest

from lqthr import cli
from lqthr import width_bound as wb
from lqthr.errors import OptimizationFailure
from lqthr.width_bound import CurvePoint, DualParams


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    lines = [l for l in text.splitlines() if l and not l.startswith("#")]
    return [dict(zip(cli.CSV_FIELDS, l.split(","))) for l in lines[1:]]


# --- curve ----------------------------------------------------------------


def test_curve_sectional_grid(capsys, tmp_path):
    out = tmp_path / "sec.csv"
    code, _, _ = run(capsys, "curve", "--kind", "sectional", "--q", "0.5", "--beta", "0.005:0.45:12",
                     "--out", str(out))
    assert code == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    text = raw.decode("utf-8")
    assert text.splitlines()[0] == "beta,alpha,nu,gamma,xtilde,objective"
    parsed = rows(text)
    assert len(parsed) == 12
    assert all(r["xtilde"] == "" for r in parsed)
    alphas = [float(r["alpha"]) for r in parsed]
    assert alphas == sorted(alphas)


def test_curve_single_point_beta_009(capsys):
    code, out, _ = run(capsys, "curve", "--kind", "sectional", "--q", "0.5", "--beta", "0.09:0.09:1")
    assert code == 0
    assert float(rows(out)[0]["alpha"]) == pytest.approx(0.4173, abs=0.01)


def test_curve_weak_single_point(capsys):
    code, out, _ = run(capsys, "curve", "--kind", "weak", "--q", "0.3", "--beta", "0.2:0.2:1")
    assert code == 0
    (row,) = rows(out)
    assert float(row["alpha"]) == pytest.approx(0.5054, abs=0.015)
    assert float(row["xtilde"]) == pytest.approx(0.87, abs=0.3)


def test_curve_strong_q0_half(capsys):
    code, out, _ = run(capsys, "curve", "--kind", "strong", "--q", "0", "--beta", "0.5:0.5:1")
    assert code == 0
    assert rows(out)[0]["alpha"] == "1.000000"


def test_curve_tsv(capsys):
    code, out, _ = run(capsys, "curve", "--kind", "strong", "--q", "0.5", "--beta", "0.1:0.1:1", "--format", "tsv")
    assert code == 0
    assert out.splitlines()[0] == "\t".join(cli.CSV_FIELDS)


def test_curve_partial_failure(capsys, monkeypatch):
    real = wb.alpha_for_beta

    def flaky(kind, beta, q, spec):
        if abs(beta - 0.2) < 1e-12:
            raise OptimizationFailure("diverged")
        return real(kind, beta, q, spec)

    monkeypatch.setattr(wb, "alpha_for_beta", flaky)
    code, out, _ = run(capsys, "curve", "--kind", "sectional", "--q", "0.5", "--beta", "0.1:0.3:3",
                       "--workers", "1")
    assert code == 2
    lines = out.splitlines()
    assert lines[2].startswith("0.200000,,")
    assert lines[-1].startswith("#error beta=0.200000")


def test_curve_unwritable(capsys):
    code, _, err = run(capsys, "curve", "--kind", "strong", "--q", "0.5", "--beta", "0.1:0.1:1",
                       "--out", "/nonexistent-dir/x.csv")
    assert code == 3 and "I/O" in err


@pytest.mark.parametrize("grid", ["0.1:0.2", "0.3:0.1:3", "0:0.5:3", "0.2:0.3:1", "a:b:c", "0.5:1.0:2"])
def test_curve_bad_grid(capsys, grid):
    code, _, _ = run(capsys, "curve", "--kind", "strong", "--q", "0.5", "--beta", grid)
    assert code == 4


def test_curve_bad_q_and_kind(capsys):
    assert run(capsys, "curve", "--kind", "strong", "--q", "1.5", "--beta", "0.1:0.1:1")[0] == 4
    assert run(capsys, "curve", "--kind", "medium", "--q", "0.5", "--beta", "0.1:0.1:1")[0] == 4
    assert run(capsys, "curve", "--kind", "strong", "--q", "0.5")[0] == 4
    assert run(capsys, "curve", "--kind", "strong", "--q", "0.5", "--beta", "0.1:0.1:1", "--nodes", "10")[0] == 4


def test_csv_round_trip():
    pts = [
        CurvePoint(0.1, 0.4123456789, DualParams(1.5, 0.3), None, math.sqrt(0.4123456789)),
        CurvePoint(0.2, 0.52, DualParams(1.1, 0.34), 0.87123, math.sqrt(0.52)),
        CurvePoint(0.3, math.nan, None, error="diverged"),
    ]
    text = cli.format_rows(pts)
    parsed, comments = cli.read_curve_csv(text)
    assert cli.write_curve_csv(parsed, comments) == text
    again, comments2 = cli.read_curve_csv(cli.write_curve_csv(parsed, comments))
    assert again == parsed and comments2 == comments


def test_read_rejects_bad_header():
    with pytest.raises(ValueError):
        cli.read_curve_csv("alpha,beta\n1,2\n")


def test_parse_grid():
    assert cli.parse_grid("0.2:0.2:1") == [0.2]
    assert cli.parse_grid("0.1:0.3:3") == pytest.approx([0.1, 0.2, 0.3])


# --- table ----------------------------------------------------------------


def test_table_sec_q05(capsys):
    code, out, _ = run(capsys, "table", "sec-q05")
    assert code == 0
    body = [l for l in out.splitlines() if l and l[0].isdigit()]
    assert len(body) == 11
    assert body[0].startswith("0.0050,0.0405,")
    assert out.rstrip().endswith("result=pass")


def test_table_str_q01(capsys):
    code, out, _ = run(capsys, "table", "str-q01")
    assert code == 0
    assert [l for l in out.splitlines() if l and l[0].isdigit()][0].startswith("0.0005,0.0128,")


def _fake_curve(offset):
    def fake(kind, q, grid, spec=None, workers=None):
        table = next(t for t in cli.TABLES.values() if t.kind == wb._kind(kind).value and t.q == q)
        by_beta = {r.beta: r for r in table.rows}
        return [CurvePoint(b, by_beta[b].alpha + offset, DualParams(1.0, 0.4), 1.0, 0.0) for b in grid]
    return fake


def test_table_weak_q05_layout(capsys, monkeypatch):
    monkeypatch.setattr(cli, "curve", _fake_curve(0.001))
    code, out, _ = run(capsys, "table", "weak-q05")
    assert code == 0
    body = [l for l in out.splitlines() if l and l[0].isdigit()]
    assert body[-1].startswith("0.9200,0.9990,")


def test_table_out_of_tolerance_fails(capsys, monkeypatch):
    monkeypatch.setattr(cli, "curve", _fake_curve(0.02))
    code, out, _ = run(capsys, "table", "weak-q03")
    assert code == 2 and "FAIL" in out and out.rstrip().endswith("result=fail")


def test_table_unknown(capsys):
    assert run(capsys, "table", "sec-q07")[0] == 4


# --- verify ---------------------------------------------------------------


def test_verify_deterministic(capsys):
    argv = ["verify", "--n", "10", "--m", "7", "--k", "2", "--q", "0.5", "--samples", "10000", "--seed", "7",
            "--kind", "sectional"]
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0 and out1 == out2
    keys = [l.split("=")[0] for l in out1.splitlines()]
    assert {"samples", "min_margin", "violation_fraction", "worst_direction"} <= set(keys)


def test_verify_fixed_matrix_hook(capsys):
    code, out, _ = run(capsys, "verify", "--n", "2", "--m", "1", "--k", "1", "--q", "0.5", "--kind", "sectional",
                       "--seed", "1", "--matrix", "1,1")
    assert code == 0 and "violation_fraction=1.000000" in out


@pytest.mark.parametrize("argv", [
    ("--n", "5", "--m", "6", "--k", "1", "--q", "0.5"),
    ("--n", "5", "--m", "3", "--k", "4", "--q", "0.5"),
    ("--n", "5", "--m", "3", "--k", "1", "--q", "0.5", "--samples", "0"),
    ("--n", "2", "--m", "1", "--k", "1", "--q", "0.5", "--matrix", "1,1,1"),
])
def test_verify_usage_errors(capsys, argv):
    assert run(capsys, "verify", *argv)[0] == 4


# --- plotscript -----------------------------------------------------------


def _csvs(tmp_path, names):
    paths = []
    for n in names:
        p = tmp_path / f"{n}.csv"
        p.write_text("beta,alpha,nu,gamma,xtilde,objective\n0.1,0.4,1,0.3,,0.63\n")
        paths.append(str(p))
    return paths


def test_plotscript_two_series(capsys, tmp_path):
    paths = _csvs(tmp_path, ["weak_q05", "weak_q1"])
    code, out, _ = run(capsys, "plotscript", *paths)
    assert code == 0
    assert 'set xlabel "alpha' in out and 'set ylabel "beta' in out
    assert out.count("using 2:1") == 2 and 'title "weak_q05"' in out and "set key" in out


def test_plotscript_eight_series_in_order(capsys, tmp_path):
    names = [f"c{i}" for i in (5, 3, 8, 1, 7, 2, 6, 4)]
    out_file = tmp_path / "plot.gp"
    code, _, _ = run(capsys, "plotscript", *_csvs(tmp_path, names), "--out", str(out_file))
    assert code == 0
    script = out_file.read_text()
    positions = [script.index(f'title "{n}"') for n in names]
    assert positions == sorted(positions) and script.count("using 2:1") == 8


def test_plotscript_errors(capsys, tmp_path):
    assert run(capsys, "plotscript")[0] == 3
    assert run(capsys, "plotscript", str(tmp_path / "missing.csv"))[0] == 3


def test_bad_subcommand(capsys):
    assert run(capsys, "frobnicate")[0] == 4
    assert run(capsys)[0] == 4


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "lqthr", "curve", "--kind", "strong", "--q", "0",
                          "--beta", "0.25:0.25:1"], capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert float(res.stdout.splitlines()[1].split(",")[1]) == pytest.approx(0.928674, abs=1e-4)


def test_worker_env(monkeypatch):
    monkeypatch.setenv("LQTHR_THREADS", "3")
    assert wb.worker_count() == 3
    monkeypatch.setenv("LQTHR_THREADS", "junk")
    assert wb.worker_count() == 1
