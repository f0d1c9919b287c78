import json

import pytest

from evotab.cli import main
from evotab.evaluator import ExperimentConfig, run_experiment
from evotab.report import render
from evotab.table import load_table

from conftest import CSV_HEADER

RUN_SMALL = ["run", "--pop-sizes", "5,10", "--iterations", "5", "--trials", "2"]


@pytest.fixture
def dataset(tmp_path):
    path = tmp_path / "bench.csv"
    assert main(["generate", "--out", str(path)]) == 0
    return path


class TestGenerate:
    def test_defaults(self, dataset, capsys):
        table = load_table(dataset)
        assert len(table) == 150 and table.count_at_least(16) == 7

    def test_same_seed_byte_identical(self, tmp_path):
        a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
        assert main(["generate", "--out", str(a), "--seed", "9"]) == 0
        assert main(["generate", "--out", str(b), "--seed", "9"]) == 0
        assert main(["generate", "--out", str(c), "--seed", "10"]) == 0
        assert a.read_bytes() == b.read_bytes() != c.read_bytes()

    def test_full_grid(self, tmp_path, capsys):
        out = tmp_path / "grid.csv"
        code = main(["generate", "--out", str(out), "--rows", "216", "--targets", "216",
                     "--threshold", "9.86"])
        assert code == 0 and len(load_table(out)) == 216
        assert "216 rows (216 with bleu >= 9.86)" in capsys.readouterr().out

    def test_impossible_spec(self, tmp_path):
        assert main(["generate", "--out", str(tmp_path / "x.csv"), "--targets", "500"]) == 2

    def test_unwritable(self, tmp_path):
        assert main(["generate", "--out", str(tmp_path / "missing" / "x.csv")]) == 1

    def test_env_seed(self, tmp_path, monkeypatch):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["generate", "--out", str(a), "--seed", "77"])
        monkeypatch.setenv("EVOTAB_SEED", "77")
        main(["generate", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_bad_env_seed(self, tmp_path, monkeypatch):
        monkeypatch.setenv("EVOTAB_SEED", "-1")
        with pytest.raises(SystemExit) as exc:
            main(["generate", "--out", str(tmp_path / "a.csv")])
        assert exc.value.code == 2


class TestValidate:
    def test_summary_line(self, dataset, capsys):
        assert main(["validate", "--dataset", str(dataset)]) == 0
        out = capsys.readouterr().out
        assert "rows=150, targets(≥16)=7, coverage=150/216" in out
        assert "fitness min=9.86 max=16.41" in out

    def test_json(self, dataset, capsys):
        assert main(["validate", "--dataset", str(dataset), "--format", "json"]) == 0
        info = json.loads(capsys.readouterr().out)
        assert info["rows"] == 150 and info["targets"] == 7

    def test_duplicate_row(self, tmp_path, capsys):
        path = tmp_path / "dup.csv"
        row = "10000,4,512,1024,8,0.0006,16.41\n"
        path.write_text(CSV_HEADER + row + row)
        assert main(["validate", "--dataset", str(path)]) == 2
        err = capsys.readouterr().err
        assert "line 3" in err and "line 2" in err

    def test_zero_fitness(self, tmp_path):
        path = tmp_path / "zero.csv"
        path.write_text(CSV_HEADER + "10000,4,512,1024,8,0.0006,0\n")
        assert main(["validate", "--dataset", str(path)]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["validate", "--dataset", str(tmp_path / "nope.csv")]) == 2

    def test_does_not_modify_input(self, dataset):
        before = dataset.read_bytes()
        main(["validate", "--dataset", str(dataset)])
        assert dataset.read_bytes() == before


class TestRun:
    def test_writes_outputs(self, dataset, tmp_path, capsys):
        out_dir = tmp_path / "out"
        before = dataset.read_bytes()
        code = main([*RUN_SMALL, "--dataset", str(dataset), "--out-dir", str(out_dir)])
        assert code == 0
        assert dataset.read_bytes() == before
        assert (out_dir / "results.jsonl").exists()
        summary = json.loads((out_dir / "summary.json").read_text())
        assert summary["schema_version"] == 1
        report = (out_dir / "report.md").read_text()
        assert "### Genetic Algorithm Results" in report
        assert "### Baseline Algorithm Results" in report
        assert "Performance Difference" in report
        assert capsys.readouterr().out == report

    def test_same_seed_same_summary(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        main([*RUN_SMALL, "--seed", "5", "--out-dir", str(a)])
        main([*RUN_SMALL, "--seed", "5", "--out-dir", str(b), "--workers", "2"])
        assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()
        assert (a / "results.jsonl").read_bytes() == (b / "results.jsonl").read_bytes()

    @pytest.mark.parametrize("fmt,ext", [("csv", "csv"), ("json", "json")])
    def test_formats(self, tmp_path, fmt, ext):
        out_dir = tmp_path / fmt
        assert main([*RUN_SMALL, "--format", fmt, "--out-dir", str(out_dir)]) == 0
        assert (out_dir / f"report.{ext}").exists()

    def test_single_algorithm(self, tmp_path, capsys):
        assert main([*RUN_SMALL, "--algo", "random", "--out-dir", str(tmp_path / "r")]) == 0
        out = capsys.readouterr().out
        assert "Baseline Algorithm Results" in out and "Genetic" not in out

    @pytest.mark.parametrize(
        "extra",
        [["--pop-sizes", "1"], ["--pop-sizes", "500"], ["--mutation-rate", "2"],
         ["--iterations", "0"], ["--seed", "abc"], ["--target", "0"]],
    )
    def test_invalid_flags(self, tmp_path, extra):
        with pytest.raises(SystemExit) as exc:
            main([*RUN_SMALL, "--out-dir", str(tmp_path / "x"), *extra])
        assert exc.value.code == 2

    def test_invalid_dataset(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("nonsense\n")
        assert main([*RUN_SMALL, "--dataset", str(path), "--out-dir", str(tmp_path / "o")]) == 2

    def test_runtime_failure(self, tmp_path):
        path = tmp_path / "hopeless.csv"
        path.write_text(CSV_HEADER + "10000,4,512,1024,8,0.0006,10\n30000,2,256,2048,16,0.001,11\n"
                        "50000,2,256,2048,16,0.001,12\n")
        code = main(["run", "--dataset", str(path), "--pop-sizes", "2", "--iterations", "1",
                     "--trials", "1", "--max-cycles", "20", "--out-dir", str(tmp_path / "o")])
        assert code == 1

    def test_unwritable_out_dir(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert main([*RUN_SMALL, "--out-dir", str(blocker / "sub")]) == 1


def test_no_subcommand():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


@pytest.fixture(scope="module")
def summary(default_table):
    cfg = ExperimentConfig(population_sizes=(5, 10), iterations_per_trial=5, trials=3)
    return run_experiment(default_table, cfg)


class TestReport:
    def test_markdown_columns(self, summary):
        text = render(summary, "markdown")
        header = ("| Initial Population Size | Trial 1 (Average Number of Individuals Added) | "
                  "Trial 2 (Average Number of Individuals Added) | "
                  "Trial 3 (Average Number of Individuals Added) | Average |")
        assert text.count(header) == 2
        assert "| Initial Population Size | Winner | Difference in Performance |" in text
        assert "Overall mean difference:" in text

    def test_csv_rows(self, summary):
        lines = render(summary, "csv").splitlines()
        assert lines[0] == "table,population_size,column,value"
        assert len(lines) == 1 + 2 * 2 * 4 + 2 * 2 + 1

    def test_unknown_format(self, summary):
        with pytest.raises(ValueError):
            render(summary, "xml")
