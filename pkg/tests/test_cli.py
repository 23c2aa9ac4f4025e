import json
import subprocess
import sys

import numpy as np
import pytest

from extremis.cli import main, read_matrix, write_matrix
from extremis.datasets import SHUTTLE_COLUMNS


def write_csv(path, X):
    write_matrix(path, np.asarray(X, dtype=float))
    return str(path)


@pytest.fixture
def train_csv(tmp_path):
    rng = np.random.default_rng(0)
    a = rng.pareto(1.0, 800) + 1
    X = np.column_stack([a, rng.pareto(1.0, 800) + 1, a * rng.uniform(0.9, 1.1, 800)])
    return write_csv(tmp_path / "train.csv", X)


def run(argv):
    return main([str(a) for a in argv])


def test_fit_comonotone_summary(tmp_path, capsys):
    col = np.random.default_rng(1).normal(size=300)
    path = write_csv(tmp_path / "c.csv", np.column_stack([col, col, col]))
    assert run(["fit", "--train", path, "--out", tmp_path / "m.json", "--eps", 0.2]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["charged_subsets"] == 1
    assert summary["dimension_histogram"] == {"3": 1.0}
    assert summary["n"] == 300 and summary["k"] == 17


def test_fit_k_too_large_is_parameter_error(tmp_path, train_csv):
    assert run(["fit", "--train", train_csv, "--out", tmp_path / "m.json", "--k", 5000]) == 3
    assert run(["fit", "--train", train_csv, "--out", tmp_path / "m.json", "--eps", 1.5]) == 3


def test_bad_input_files(tmp_path, capsys):
    assert run(["fit", "--train", tmp_path / "missing.csv", "--out", tmp_path / "m.json"]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,x\n")
    assert run(["fit", "--train", bad, "--out", tmp_path / "m.json"]) == 2
    broken = tmp_path / "broken.json"
    broken.write_text('{"version": 1, "par')
    assert run(["score", "--model", broken, "--in", bad, "--out", tmp_path / "s.csv"]) == 2
    assert "line 1" in capsys.readouterr().err


def test_score_dimension_mismatch(tmp_path, train_csv):
    model = tmp_path / "m.json"
    assert run(["fit", "--train", train_csv, "--out", model, "--eps", 0.1]) == 0
    narrow = write_csv(tmp_path / "narrow.csv", np.ones((4, 2)))
    assert run(["score", "--model", model, "--in", narrow, "--out", tmp_path / "s.csv"]) == 2


def test_score_output_and_determinism(tmp_path, train_csv):
    model = tmp_path / "m.json"
    assert run(["fit", "--train", train_csv, "--out", model, "--eps", 0.1]) == 0
    outs = []
    for name in ("s1.csv", "s2.csv"):
        assert run(["score", "--model", model, "--in", train_csv, "--out", tmp_path / name]) == 0
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]
    lines = outs[0].decode().splitlines()
    assert lines[0] == "row_index,score,radius,subset"
    assert len(lines) == 801
    for i, line in enumerate(lines[1:]):
        idx, s, r, sub = line.split(",")
        assert int(idx) == i and float(s) >= 0 and np.isfinite(float(s))
        assert all(int(t) >= 1 for t in sub.split("|"))


def test_monotone_transform_gives_identical_score_column(tmp_path, train_csv):
    X = read_matrix(train_csv)
    logged = write_csv(tmp_path / "log.csv", np.log(X))
    cols = []
    for src, tag in ((train_csv, "a"), (logged, "b")):
        model = tmp_path / f"{tag}.json"
        assert run(["fit", "--train", src, "--out", model, "--eps", 0.1]) == 0
        assert run(["score", "--model", model, "--in", src, "--out", tmp_path / f"{tag}.csv"]) == 0
        cols.append((tmp_path / f"{tag}.csv").read_bytes())
    assert cols[0] == cols[1]


def test_simulate_twice_identical(tmp_path):
    args = ["simulate", "--d", 5, "--K", 4, "--n", 200, "--seed", 7]
    assert run(args + ["--out", tmp_path / "a.csv", "--spec-out", tmp_path / "a.json"]) == 0
    assert run(args + ["--out", tmp_path / "b.csv", "--spec-out", tmp_path / "b.json"]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert read_matrix(tmp_path / "a.csv").shape == (200, 5)
    assert run(["simulate", "--d", 3, "--K", 9, "--n", 10, "--out", tmp_path / "c.csv"]) == 3


def test_recover_report(tmp_path):
    out = tmp_path / "r.json"
    assert run(["recover", "--d", 5, "--K", 3, "--n", 3000, "--runs", 2, "--eps", 0.2, "--p", 0.5,
                "--out", out]) == 0
    doc = json.loads(out.read_text())
    assert doc["runs"] == 2 and len(doc["errors"]) == 2 and "mean_errors" in doc


def shuttle_csv(tmp_path, classes):
    rng = np.random.default_rng(2)
    rows = rng.pareto(1.0, size=(len(classes), 9))
    path = tmp_path / "shuttle.csv"
    with open(path, "w") as fh:
        fh.write(",".join(SHUTTLE_COLUMNS) + "\n")
        for r, c in zip(rows, classes):
            fh.write(",".join(repr(float(v)) for v in r) + f",{c}\n")
    return path


def test_eval_report_schema(tmp_path):
    classes = [1] * 600 + [3] * 30
    raw = shuttle_csv(tmp_path, classes)
    out = tmp_path / "e.json"
    assert run(["eval", "--recipe", "shuttle", "--raw", raw, "--runs", 2, "--eps", 0.1, "--out", out]) == 0
    doc = json.loads(out.read_text())
    for key in ("roc_auc", "pr_auc", "n_extreme", "roc_curve", "pr_curve", "per_run"):
        assert key in doc


def test_eval_single_class_is_undefined_metric(tmp_path):
    raw = shuttle_csv(tmp_path, [1] * 50)
    assert run(["eval", "--recipe", "shuttle", "--raw", raw, "--runs", 1]) == 4


def test_console_entry_point(tmp_path, train_csv):
    res = subprocess.run([sys.executable, "-m", "extremis.cli", "fit", "--train", train_csv,
                          "--out", str(tmp_path / "m.json"), "--k", "1000000"],
                         capture_output=True, text=True)
    assert res.returncode == 3
    assert "parameter error" in res.stderr
