import csv

import pytest

from stealpool.cli import main


def test_bench_subcommand_writes_csv(tmp_path, capsys):
    out = tmp_path / "records.csv"
    code = main([
        "bench", "--workload", "expr", "--threads", "1,2",
        "--iterations", "2", "--warmup", "0", "--out", str(out),
    ])
    assert code == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 1 + 4
    assert all(r[-1] == "21" for r in rows[1:])
    assert "median_wall" in capsys.readouterr().out


def test_bench_param_sweep(tmp_path):
    out = tmp_path / "fib.csv"
    code = main([
        "bench", "--workload", "fib", "--param", "5,10", "--threads", "1",
        "--iterations", "1", "--out", str(out),
    ])
    assert code == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    assert {(r[1], r[-1]) for r in rows} == {("5", "5"), ("10", "55")}


def test_bench_empty_threads_is_usage_error(capsys):
    code = main(["bench", "--workload", "fib", "--param", "5", "--threads", ","])
    assert code == 2
    assert "thread list is empty" in capsys.readouterr().err


def test_bench_unwritable_out_is_usage_error(tmp_path):
    target = tmp_path / "missing" / "out.csv"
    code = main(["bench", "--workload", "expr", "--out", str(target)])
    assert code == 2


def test_bench_checksum_mismatch_exit_code(monkeypatch):
    import stealpool.bench as bench_mod

    monkeypatch.setattr(bench_mod, "fib_reference", lambda n: -1)
    code = main(["bench", "--workload", "fib", "--param", "4", "--threads", "1",
                 "--iterations", "1", "--warmup", "0"])
    assert code == 1


def test_bench_rejects_unknown_workload():
    with pytest.raises(SystemExit) as info:
        main(["bench", "--workload", "quicksort"])
    assert info.value.code == 2


def test_verify_deque_scenario(tmp_path, capsys):
    out = tmp_path / "verify.csv"
    code = main([
        "verify", "--scenario", "deque", "--items", "5000", "--thieves", "2",
        "--owner-pops", "100", "--seeds", "1,2", "--out", str(out),
    ])
    assert code == 0
    assert capsys.readouterr().out.count("-> ok") == 2
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 3


def test_verify_dag_scenario(capsys):
    code = main([
        "verify", "--scenario", "dag", "--dags", "10", "--max-nodes", "16",
        "--edge-prob", "0.2", "--threads", "2", "--seed", "3",
    ])
    assert code == 0
    assert "10 graphs, 0 failures" in capsys.readouterr().out
