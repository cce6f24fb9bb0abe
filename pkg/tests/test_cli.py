import subprocess
import sys

import pytest

from curvelab import cli
from curvelab.report import read_csv

FAST = ["symmetries", "--m", "2", "--d", "1", "--samples", "2"]


def test_parse_range():
    assert cli.parse_range("2:5") == (2, 3, 4, 5)
    assert cli.parse_range("4, 6,10") == (4, 6, 10)
    for bad in ("5:2", "a:b", "3,3,4", ""):
        with pytest.raises(cli.UsageError):
            cli.parse_range(bad)


def test_config_file_and_flag_precedence(tmp_path):
    conf = tmp_path / "lab.conf"
    conf.write_text("# sweep\nseed = 3\nm=3\nell = 2:6   # inclusive\nplot = yes\n")
    assert cli.parse_config_file(conf) == {"seed": 3, "m": 3, "ell": (2, 3, 4, 5, 6), "plot": True}
    cfg = cli.build_config(["kernel-decay", "--config", str(conf), "--seed", "9", "--ell", "3,5,7,9"])
    assert (cfg.seed, cfg.m, cfg.ell, cfg.plot) == (9, 3, (3, 5, 7, 9), True)


@pytest.mark.parametrize("text", ["colour = red\n", "seed 3\n", "seed = x\n", "plot = maybe\n"])
def test_config_file_errors(tmp_path, text):
    conf = tmp_path / "bad.conf"
    conf.write_text(text)
    with pytest.raises(cli.UsageError):
        cli.parse_config_file(conf)


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["lemmas", "--seed", "-1"],
    ["operator-decay", "--grid", "100"],
    ["kernel-decay", "--ell", "2:4"],
    ["lemmas", "--tol", "0"],
    ["lemmas", "--config", "/nonexistent/lab.conf"],
])
def test_usage_errors_exit_2(argv, tmp_path, capsys):
    assert cli.main(argv + ["--out", str(tmp_path)]) == 2
    assert "lab: error:" in capsys.readouterr().err


def test_bad_thread_count_exits_2(monkeypatch, tmp_path):
    monkeypatch.setenv("LAB_THREADS", "many")
    assert cli.main(FAST + ["--out", str(tmp_path)]) == 2


def test_unwritable_out_exits_2(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert cli.main(FAST + ["--out", str(blocker / "sub")]) == 2


def test_success_and_failure_exit_codes(tmp_path, capsys):
    assert cli.main(FAST + ["--out", str(tmp_path / "ok")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("PASS symmetry")
    comments, header, rows = read_csv(tmp_path / "ok" / "report.csv")
    assert comments == ["# seed=0"] and header[0] == "experiment" and rows

    assert cli.main(FAST + ["--tol", "1e-30", "--out", str(tmp_path / "bad")]) == 1
    cap = capsys.readouterr()
    assert "FAIL symmetry" in cap.out and "failing row" in cap.err
    assert (tmp_path / "bad" / "report.csv").exists()


def test_report_independent_of_thread_count(tmp_path, monkeypatch):
    monkeypatch.setenv("LAB_THREADS", "1")
    cli.main(FAST + ["--seed", "5", "--out", str(tmp_path / "a")])
    monkeypatch.setenv("LAB_THREADS", "3")
    cli.main(FAST + ["--seed", "5", "--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "report.csv").read_bytes() == (tmp_path / "b" / "report.csv").read_bytes()


def test_plot_without_profile_warns(tmp_path, capsys):
    assert cli.main(FAST + ["--plot", "--out", str(tmp_path)]) == 0
    assert "no decay profile" in capsys.readouterr().err
    assert not (tmp_path / "plot.svg").exists()


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "curvelab.cli", *FAST, "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "PASS" in res.stdout
