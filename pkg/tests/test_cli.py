import json

import pytest

from crowdkmeans.cli import main
from crowdkmeans.datasets import BlobSpec, generate_blobs, save_csv


@pytest.fixture
def blob_csv(tmp_path):
    path = tmp_path / "blob.csv"
    save_csv(generate_blobs(BlobSpec(90, 2, 3, rng_seed=2)), path)
    return path


def test_run_prints_metric_report(blob_csv, capsys):
    assert main(["run", "--data", str(blob_csv), "--label-col", "label", "--k", "3", "--init", "ckmeans"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc) >= {"IS", "RI", "MI", "SI", "DB", "CH", "iterations", "converged"}
    assert 0 <= doc["RI"] <= 1


def test_run_infers_k_and_standardizes(blob_csv, capsys):
    assert main(["run", "--data", str(blob_csv), "--label-col", "label", "--init", "rckmeans",
                 "--seed", "4", "--standardize", "--tol", "1e-8", "--max-iter", "50"]) == 0
    assert json.loads(capsys.readouterr().out)["k"] == 3


def test_run_without_labels_omits_external(tmp_path, capsys):
    path = tmp_path / "u.csv"
    path.write_text("a,b\n0,0\n0,1\n9,9\n9,8\n")
    assert main(["run", "--data", str(path), "--k", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert "RI" not in doc and "MI" not in doc


def test_exit_codes(tmp_path, blob_csv, capsys):
    assert main(["run", "--data", str(tmp_path / "missing.csv"), "--k", "2"]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("a\n1\nx\n")
    assert main(["run", "--data", str(bad), "--k", "1"]) == 2
    assert main(["run", "--data", str(blob_csv), "--label-col", "label", "--k", "500"]) == 2
    dup = tmp_path / "dup.csv"
    dup.write_text("a\n1\n1\n1\n")
    # two clusters on identical points: DB undefined but reported per metric, run still succeeds
    assert main(["run", "--data", str(dup), "--k", "2"]) == 0
    with pytest.raises(SystemExit) as err:
        main(["run", "--init", "pca"])
    assert err.value.code == 1
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == 1


def test_gen_bench_rank(tmp_path, capsys):
    manifest = tmp_path / "blobs.csv"
    manifest.write_text("name,n,d,k,std,seed\nsmall,60,2,3,1.0,1\nwide,80,3,2,0.5,2\n")
    assert main(["gen", "--manifest", str(manifest), "--out", str(tmp_path / "data")]) == 0
    assert (tmp_path / "data" / "small.csv").exists()
    grid = tmp_path / "grid.toml"
    grid.write_text(
        'restarts = 2\nmethods = ["random", "kmeanspp", "ckmeans"]\n'
        '[[datasets]]\npath = "data/small.csv"\nlabel_column = "label"\n'
        '[[datasets]]\npath = "data/wide.csv"\nlabel_column = "label"\n'
    )
    assert main(["bench", "--manifest", str(grid), "--out", str(tmp_path / "res")]) == 0
    assert (tmp_path / "res" / "ranks_IS.csv").exists()
    capsys.readouterr()
    assert main(["rank", "--results", str(tmp_path / "res" / "results.json"), "--metric", "IS"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("metric,method,mean_rank")
    assert len(lines) == 4
    assert main(["bench", "--manifest", str(tmp_path / "none.toml"), "--out", str(tmp_path / "x")]) == 2
