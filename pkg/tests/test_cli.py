import csv
import json
import subprocess
import sys

import pytest

import qtau.qschur as qschur
import qtau.tau as tau_mod
from qtau.cache import CACHE_ENV
from qtau.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from qtau.report import VerificationReport


@pytest.fixture(autouse=True)
def fresh_default_table(monkeypatch):
    monkeypatch.delenv(CACHE_ENV, raising=False)
    yield
    qschur.set_default_store(None)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err


def test_partitions_list(capsys):
    assert run(capsys, "partitions", "list", "--weight", "6")[:2] == (EXIT_OK, "6 / 5,1 / 4,2 / 3,2,1")
    assert run(capsys, "partitions", "list", "--weight", "0")[:2] == (EXIT_OK, "-")


def test_qschur_compute(capsys, tmp_path):
    code, out, _ = run(capsys, "qschur", "compute", "--lambda", "2,1", "--max-weight", "3",
                       "--normalization", "mac", "--json", str(tmp_path / "q.json"))
    assert code == EXIT_OK and out == "4/3*t1^3 - 4*t3"
    assert json.loads((tmp_path / "q.json").read_text())


def test_qschur_eval(capsys, tmp_path):
    assert run(capsys, "qschur", "eval", "--lambda", "2,1", "--point", "delta1")[:2] == (EXIT_OK, "2/3")
    assert run(capsys, "qschur", "eval", "--lambda", "3", "--point", "delta3over3",
               "--normalization", "mac")[:2] == (EXIT_OK, "2/3")
    # q_3 is the z^3 coefficient of exp(2 t_3 z^3) at t_3 = 1/3
    pt = tmp_path / "pt.json"
    pt.write_text(json.dumps({"1": "1", "3": "0"}))
    assert run(capsys, "qschur", "eval", "--lambda", "1", "--point", f"@{pt}",
               "--normalization", "mac")[:2] == (EXIT_OK, "2")


@pytest.mark.parametrize("argv", [
    ["qschur", "eval", "--lambda", "2,2", "--point", "delta1"],
    ["qschur", "eval", "--lambda", "1", "--point", "nowhere"],
    ["partitions", "list", "--weight", "-1"],
    ["tau", "cutjoin", "--model", "kw", "--order", "3", "--max-weight", "5"],
    ["tau", "cutjoin", "--model", "bgw", "--order", "2", "--nu", "1/4", "--nu-symbolic"],
    ["tau", "hypergeom", "--model", "kw", "--max-weight", "3", "--beta", "0"],
    ["tau", "cutjoin", "--model", "bgw", "--order", "1", "--bkp-b", "1"],
    ["verify", "mm", "--threads", "0"],
    ["verify", "nonsense"],
    ["bench", "--min-weight", "5", "--max-weight", "3"],
    [],
])
def test_usage_errors(capsys, argv):
    assert main(argv) == EXIT_USAGE


def test_tau_cutjoin_bgw(capsys):
    code, out, _ = run(capsys, "tau", "cutjoin", "--model", "bgw", "--order", "1")
    assert code == EXIT_OK and "1/8" in out and "t1" in out


def test_tau_log_and_files(capsys, tmp_path):
    csv_path = tmp_path / "kw.csv"
    code, out, _ = run(capsys, "tau", "cutjoin", "--model", "kw", "--order", "2", "--log",
                       "--json", str(tmp_path / "kw.json"), "--csv", str(csv_path))
    assert code == EXIT_OK
    assert "1/6" in out and "1/8" in out
    rows = list(csv.reader(csv_path.open()))
    assert len(rows) > 2
    assert csv_path.with_suffix(".png").stat().st_size > 0


def test_tau_routes_agree(capsys):
    _, cut, _ = run(capsys, "tau", "cutjoin", "--model", "kw", "--max-weight", "6")
    _, qexp, _ = run(capsys, "tau", "qexpand", "--model", "kw", "--max-weight", "6")
    assert cut == qexp


def test_verify_writes_reports(capsys, tmp_path, cache_dir):
    rep = tmp_path / "out" / "hook.json"
    code, out, _ = run(capsys, "verify", "hook", "--max-weight", "8", "--report", str(rep),
                       "--cache-dir", str(cache_dir))
    assert code == EXIT_OK
    body = json.loads(rep.read_text())
    assert body["campaign"] == "hook" and "timing" in body
    rows = list(csv.DictReader(rep.with_suffix(".csv").open()))
    assert rows and all(r["pass"] == "1" for r in rows)
    assert rep.with_suffix(".png").stat().st_size > 0


def test_verify_failure_exit_code(capsys, monkeypatch):
    def failing(which, cap, table=None):
        r = VerificationReport(which, {})
        r.add("x", "1", "2", False)
        return r

    monkeypatch.setattr(tau_mod, "verify_conjecture", failing)
    assert run(capsys, "verify", "c2", "--max-weight", "2")[0] == EXIT_FAIL


def test_verify_body_independent_of_threads_and_cache(capsys, tmp_path, cache_dir, monkeypatch):
    bodies = []
    for i, extra in enumerate([[], ["--threads", "2"], ["--cache-dir", str(cache_dir)],
                               ["--cache-dir", str(cache_dir)]]):
        qschur.set_default_store(None)
        rep = tmp_path / f"r{i}.json"
        assert main(["verify", "bgw-q", "--max-weight", "8", "--report", str(rep), "--no-plot"] + extra) == 0
        body = json.loads(rep.read_text())
        body.pop("timing")
        bodies.append(body)
        assert not rep.with_suffix(".png").exists()
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "envcache"))
    qschur.set_default_store(None)
    rep = tmp_path / "env.json"
    assert main(["verify", "bgw-q", "--max-weight", "8", "--report", str(rep), "--no-plot"]) == 0
    assert (tmp_path / "envcache").exists()
    body = json.loads(rep.read_text())
    body.pop("timing")
    bodies.append(body)
    capsys.readouterr()
    assert all(b == bodies[0] for b in bodies)


@pytest.mark.parametrize("campaign", ["hirota-bkp", "virasoro", "cauchy"])
def test_verify_small_campaigns(capsys, campaign):
    assert run(capsys, "verify", campaign, "--max-weight", "4")[0] == EXIT_OK


def test_bench_command(capsys, tmp_path):
    rep = tmp_path / "bench.json"
    code, out, _ = run(capsys, "bench", "--min-weight", "2", "--max-weight", "8", "--repeats", "1",
                       "--report", str(rep))
    assert code == EXIT_OK and "speedup" in out
    data = json.loads(rep.read_text())
    assert data["totals"]["warm_pfaffian_evaluations"] == 0
    assert rep.with_suffix(".png").exists()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qtau", "partitions", "list", "--weight", "4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "4 / 3,1"
    proc = subprocess.run([sys.executable, "-m", "qtau", "verify"], capture_output=True, text=True)
    assert proc.returncode == 2
