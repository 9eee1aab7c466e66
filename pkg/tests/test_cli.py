import json
from pathlib import Path

import pytest

from apsq.cli import main
from apsq.gridspec import load_gridspec

SNAPSHOT_DIR = Path(__file__).resolve().parent.parent / "snapshots"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_delta(capsys):
    assert run(capsys, "delta", "--a", "2", "--d", "3", "--N", "2") == (0, "delta=1 n=0 m=1\n", "")
    code, out, _ = run(capsys, "delta", "--a", "2", "--d", "3", "--N", "2", "--json")
    assert code == 0 and json.loads(out) == {"a": "2", "d": "3", "N": "2", "delta": "1", "n": "0", "m": "1", "algorithm": "TermScan"}


@pytest.mark.parametrize(
    "argv",
    [
        ["delta", "--a", "-1", "--d", "3", "--N", "2"],
        ["delta", "--a", "1", "--d", "0", "--N", "2"],
        ["delta", "--a", "x", "--d", "3", "--N", "2"],
        ["delta"],
        ["nonsense"],
        [],
        ["salie", "--q", "8", "--a", "1", "--H", "2", "--K", "2"],
        ["family", "--dprime", "1", "--x", "1", "--n", "1", "--verify"],
        ["huxley", "--curve", "root", "--a", "1000000000", "--d", "1000", "--n", "2000", "--eps", "0.25"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_family(capsys):
    code, out, _ = run(capsys, "family", "--dprime", "2", "--x", "1", "--n", "2", "--verify")
    assert code == 0 and "d=38 a=4011 delta=9 bound_ok=true" in out
    code, out, _ = run(capsys, "family", "--dprime", "100", "--x", "1", "--scan-n", "--verify")
    assert code == 0 and out.count("bound_ok=true") == 13


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--a", "4011", "--d", "38", "--N", "2")
    assert code == 0
    assert "note_range=true" in out and "admissible_paper=false" in out and "contains_square=false" in out


def test_gauss_and_salie(capsys):
    code, out, _ = run(capsys, "gauss", "--a", "1", "--b", "0", "--q", "5")
    assert code == 0 and "agree=true" in out
    code, out, _ = run(capsys, "gauss", "--a", "2", "--b", "1", "--q", "8")
    assert code == 0 and "closed" not in out
    code, out, _ = run(capsys, "salie", "--q", "257", "--a", "1", "--H", "16", "--K", "16", "--epsilon", "0")
    assert code == 0 and "bound=71.9" in out


def test_huxley_and_poisson(capsys):
    code, out, _ = run(capsys, "huxley", "--curve", "parabola", "--a", "0", "--d", "300", "--n", "30000", "--eps", "1/4")
    assert code == 0 and "ok=true" in out
    code, out, _ = run(capsys, "poisson", "--a", "100", "--d", "7", "--m-window", "5", "--h", "1", "--kmax", "200")
    assert code == 0 and "ok=true" in out


def test_sweep_cli(tmp_path, capsys, monkeypatch):
    spec = tmp_path / "g.txt"
    spec.write_text("task=Delta\na=0..100\nd=1..10\nN=1..10\n")
    code, out, _ = run(capsys, "sweep", "--spec", str(spec), "--out", str(tmp_path / "o.csv"))
    assert code == 0 and "rows=10100" in out and "complete=true" in out
    monkeypatch.setenv("APSQ_JOBS", "2")
    code, _, _ = run(capsys, "sweep", "--spec", str(spec), "--out", str(tmp_path / "p.csv"))
    assert code == 0 and (tmp_path / "o.csv").read_bytes() == (tmp_path / "p.csv").read_bytes()
    # one row spot-checked against the single-point command
    line = (tmp_path / "o.csv").read_text().splitlines()[1234].split(",")
    _, out, _ = run(capsys, "delta", "--a", line[0], "--d", line[1], "--N", line[2])
    assert out == f"delta={line[3]} n={line[4]} m={line[5]}\n"
    code, _, _ = run(capsys, "sweep", "--spec", str(spec), "--out", str(tmp_path / "o.jsonl"), "--json")
    assert code == 0 and json.loads((tmp_path / "o.jsonl").read_text().splitlines()[0])["a"] == "0"


def test_sweep_bad_spec(tmp_path, capsys):
    spec = tmp_path / "g.txt"
    spec.write_text("task=Delta\na=5..1\nd=1\nN=1\n")
    code, _, err = run(capsys, "sweep", "--spec", str(spec), "--out", str(tmp_path / "o.csv"))
    assert code == 2 and "a:" in err
    code, _, err = run(capsys, "sweep", "--spec", str(tmp_path / "nope.txt"), "--out", str(tmp_path / "o.csv"))
    assert code == 2


def test_snapshot_cli(tmp_path, capsys):
    grid = tmp_path / "g.txt"
    grid.write_text("task=RatioThm1\na=0..200\nd=1..30\nN=1..30\n")
    assert run(capsys, "snapshot", "--task", "RatioCor1", "--grid", str(grid), "--check")[0] == 2
    assert run(capsys, "snapshot", "--task", "RatioCor1", "--grid", str(grid), "--write")[0] == 0
    store = tmp_path / "g.RatioCor1.json"
    assert store.exists()
    assert run(capsys, "snapshot", "--task", "RatioCor1", "--grid", str(grid), "--check")[0] == 0
    snap = json.loads(store.read_text())
    snap["max_ratio"] = str(float(snap["max_ratio"]) * 1.001)
    store.write_text(json.dumps(snap))
    code, out, _ = run(capsys, "snapshot", "--task", "RatioCor1", "--grid", str(grid), "--check")
    assert code == 1 and "mismatch" in out
    code, out, _ = run(capsys, "snapshot", "--task", "RatioThm1", "--grid", str(grid))
    assert code == 0 and json.loads(out)["task"] == "RatioThm1"


def test_shipped_snapshots_belong_to_shipped_grid():
    grid = load_gridspec(SNAPSHOT_DIR / "grid1.txt")
    for task in ("RatioThm1", "RatioCor1", "RatioConj1"):
        snap = json.loads((SNAPSHOT_DIR / f"grid1.{task}.json").read_text())
        assert snap["task"] == task
        assert snap["grid_hash"] == grid.with_task(task).grid_hash()
