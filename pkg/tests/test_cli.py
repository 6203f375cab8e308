"""CLI surface: repair and bench subcommands, exit codes, artifacts."""
import json
from pathlib import Path

from condfix.cli import EXIT_NO_PATCH, EXIT_PATCHED, EXIT_USAGE, main
from condfix.corpus import default_corpus_dir


def write_gcd_inputs(tmp_path: Path):
    from conftest import GCD_BUGGY, GCD_SUITE

    program = tmp_path / "program.ml"
    suite = tmp_path / "suite.txt"
    program.write_text(GCD_BUGGY)
    suite.write_text(GCD_SUITE)
    return program, suite


class TestRepairCommand:
    def test_patched_exit_code_and_diff(self, tmp_path, capsys):
        program, suite = write_gcd_inputs(tmp_path)
        report_path = tmp_path / "report.json"
        code = main([
            "repair", "--program", str(program), "--suite", str(suite),
            "--report-json", str(report_path),
        ])
        assert code == EXIT_PATCHED
        out = capsys.readouterr().out
        assert out.startswith("--- a/program.ml")
        payload = json.loads(report_path.read_text())
        assert payload["outcome"] == "patched"
        assert payload["diff"] in out

    def test_no_patch_exit_code(self, tmp_path, capsys):
        program = tmp_path / "program.ml"
        suite = tmp_path / "suite.txt"
        program.write_text(
            "fn addTwice(base: int) -> int {\n"
            "  let t1: int = step(base);\n"
            "  let t2: int = step(t1);\n"
            "  return t2;\n"
            "}\n"
            "fn step(acc: int) -> int {\n"
            "  acc = acc + 10;\n"
            "  return acc;\n"
            "}\n"
        )
        suite.write_text("double: addTwice(0) -> 10\n")
        code = main(["repair", "--program", str(program), "--suite", str(suite)])
        assert code == EXIT_NO_PATCH
        assert "no-angelic-value" in capsys.readouterr().out

    def test_usage_error_on_bad_input(self, tmp_path, capsys):
        program = tmp_path / "program.ml"
        program.write_text("fn broken(")
        suite = tmp_path / "suite.txt"
        suite.write_text("a: broken() -> 1\n")
        code = main(["repair", "--program", str(program), "--suite", str(suite)])
        assert code == EXIT_USAGE


class TestBenchCommand:
    def test_bench_writes_deterministic_csv(self, tmp_path, capsys):
        out = tmp_path / "report.csv"
        corpus = default_corpus_dir()
        code = main(["bench", "--corpus", str(corpus), "--out", str(out)])
        assert code == EXIT_PATCHED  # everything matched expectations
        first = out.read_text()
        assert (tmp_path / "report_effort.csv").exists()

        code = main(["bench", "--corpus", str(corpus), "--out", str(out)])
        assert code == EXIT_PATCHED
        assert out.read_text() == first

    def test_bench_missing_corpus(self, tmp_path, capsys):
        code = main(["bench", "--corpus", str(tmp_path), "--out", str(tmp_path / "r.csv")])
        assert code == EXIT_USAGE
