import csv
import json

import pytest

from authordrift.cli import main

from conftest import CORKUM_PRODUCTS, write_jsonl


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def csv_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_couples_fixture(corkum_files, tmp_path, capsys):
    products, relations = corkum_files
    code, out, _ = run(capsys, "couples", "--products", str(products), "--relations", str(relations),
                       "--out-dir", str(tmp_path / "out"))
    assert code == 0
    assert json.loads(out)["couples"] == 1
    lines = (tmp_path / "out" / "couples.jsonl").read_text().splitlines()
    assert len(lines) == 1


def test_missing_input_exit_2(tmp_path, capsys):
    code, _, err = run(capsys, "couples", "--products", str(tmp_path / "nope.jsonl"),
                       "--relations", str(tmp_path / "nope2.jsonl"), "--out-dir", str(tmp_path))
    assert code == 2
    assert "error" in err


def test_no_inputs_exit_2(tmp_path, capsys):
    code, _, _ = run(capsys, "couples", "--out-dir", str(tmp_path))
    assert code == 2


def test_run_corkum_simple_only(corkum_files, tmp_path, capsys):
    products, relations = corkum_files
    out_dir = tmp_path / "out"
    code, _, _ = run(capsys, "--simple-only", "run", "--products", str(products),
                     "--relations", str(relations), "--out-dir", str(out_dir))
    assert code == 0
    (row,) = csv_rows(out_dir / "drift.csv")
    assert row["jaccard"] == "1.0"
    assert row["intersection"] == "6"
    assert (out_dir / "aggregate.csv").exists()


def test_run_exact_names(corkum_files, tmp_path, capsys):
    products, relations = corkum_files
    out_dir = tmp_path / "out"
    code, _, _ = run(capsys, "run", "--simple-only", "--exact-names", "--products", str(products),
                     "--relations", str(relations), "--out-dir", str(out_dir))
    assert code == 0
    (row,) = csv_rows(out_dir / "drift.csv")
    assert row["intersection"] == "3"
    assert row["symdiff"] == "6"


def test_calibration_underflow_exit_3(corkum_files, tmp_path, capsys):
    products, relations = corkum_files
    code, _, err = run(capsys, "run", "--products", str(products), "--relations", str(relations),
                       "--out-dir", str(tmp_path))
    assert code == 3
    assert "--simple-only" in err


def test_empty_couples_exit_0(tmp_path, capsys):
    products = write_jsonl(tmp_path / "p.jsonl", CORKUM_PRODUCTS)
    relations = write_jsonl(tmp_path / "r.jsonl", [])
    code, _, _ = run(capsys, "run", "--simple-only", "--products", str(products),
                     "--relations", str(relations), "--out-dir", str(tmp_path / "out"))
    assert code == 0
    assert csv_rows(tmp_path / "out" / "drift.csv") == []


def test_simple_only_on_dateless_corpus(tmp_path, capsys):
    rows = [{k: v for k, v in r.items() if k != "date"} for r in CORKUM_PRODUCTS]
    products = write_jsonl(tmp_path / "p.jsonl", rows)
    relations = write_jsonl(tmp_path / "r.jsonl", [
        {"source": rows[0]["id"], "target": rows[1]["id"], "semantics": "Cites"},
    ])
    code, out, _ = run(capsys, "run", "--simple-only", "--products", str(products),
                       "--relations", str(relations), "--out-dir", str(tmp_path / "out"))
    assert code == 0
    assert (tmp_path / "out" / "retrofitted.jsonl").read_text() == ""


def test_config_file(corkum_files, tmp_path, capsys):
    products, relations = corkum_files
    cfg = tmp_path / "pipeline.cfg"
    cfg.write_text(
        f"products = {products.name}\nrelations = {relations.name}\nout_dir = cfgout\n"
        "simple_only = true\nexact_names = true\ngroup_by = year\n"
    )
    code, _, _ = run(capsys, "run", "--config", str(cfg))
    assert code == 0
    (row,) = csv_rows(tmp_path / "cfgout" / "drift.csv")
    assert row["intersection"] == "3"
    (agg,) = csv_rows(tmp_path / "cfgout" / "aggregate.csv")
    assert agg["year"] == "2015"


def test_flag_overrides_config(corkum_files, tmp_path, capsys):
    products, relations = corkum_files
    cfg = tmp_path / "pipeline.cfg"
    cfg.write_text(f"[authordrift]\nproducts = {products}\nrelations = {relations}\nsimple_only = true\n")
    out_dir = tmp_path / "flagout"
    code, _, _ = run(capsys, "run", "--config", str(cfg), "--out-dir", str(out_dir))
    assert code == 0
    assert (out_dir / "drift.csv").exists()


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "couples", "--config", str(cfg))
    assert code == 2
    assert "colour" in err


def test_report_without_analyze_exit_2(tmp_path, capsys):
    code, _, _ = run(capsys, "report", "--out-dir", str(tmp_path))
    assert code == 2


def test_generate_then_run_with_truth(tmp_path, capsys):
    data = tmp_path / "data"
    code, out, _ = run(capsys, "generate", "--seed", "3", "--out-dir", str(data))
    assert code == 0
    files = json.loads(out)["files"]
    code, out, _ = run(capsys, "retrofit", "--products", files["products"], "--relations", files["relations"],
                       "--out-dir", str(data), "--truth", files["truth"])
    assert code == 2  # couples stage has not run yet
    code, _, _ = run(capsys, "couples", "--products", files["products"], "--relations", files["relations"],
                     "--out-dir", str(data))
    assert code == 0
    code, out, _ = run(capsys, "retrofit", "--products", files["products"], "--relations", files["relations"],
                       "--out-dir", str(data), "--truth", files["truth"])
    assert code == 0
    summary = json.loads(out)
    assert summary["retrofit"]["overlap_with_declared"] == 0
    assert summary["evaluation"]["simple"]["recall"] >= 0.95


@pytest.mark.parametrize("argv", [["--weights", "1,2"], ["frobnicate"]])
def test_bad_usage(argv, capsys):
    with pytest.raises(SystemExit) as err:
        main(argv)
    assert err.value.code == 2
