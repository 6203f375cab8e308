"""Suite execution, verdicts, and the suite file format."""
import pytest

from condfix.errors import SuiteFormatError
from condfix.minilang import ExecutionResult, NULL, Obj
from condfix.testkit import (
    TestCase, parse_suite, render_suite, run_suite, verdict_holds,
)


class TestVerdicts:
    def test_int_exact_match(self):
        test = TestCase("t", "f", (), expected_value=6)
        assert verdict_holds(ExecutionResult(value=6), test)
        assert not verdict_holds(ExecutionResult(value=7), test)

    def test_expected_error_matches_thrown(self):
        test = TestCase("t", "f", (), expected_error="IllegalArgument")
        assert verdict_holds(ExecutionResult(error="IllegalArgument"), test)
        assert not verdict_holds(ExecutionResult(error="Other"), test)
        assert not verdict_holds(ExecutionResult(value=1), test)

    def test_real_tolerance_is_1e9_absolute(self):
        test = TestCase("t", "f", (), expected_value=0.5)
        assert verdict_holds(ExecutionResult(value=0.5000000001), test)
        assert not verdict_holds(ExecutionResult(value=0.5000001), test)

    def test_bool_and_int_do_not_cross_match(self):
        assert not verdict_holds(
            ExecutionResult(value=1), TestCase("t", "f", (), expected_value=True)
        )
        assert not verdict_holds(
            ExecutionResult(value=True), TestCase("t", "f", (), expected_value=1)
        )

    def test_timeout_never_passes(self):
        test = TestCase("t", "f", (), expected_error="TimeoutDuringExecution")
        result = ExecutionResult(error="TimeoutDuringExecution", timed_out=True)
        assert not verdict_holds(result, test)

    def test_exactly_one_oracle_enforced(self):
        with pytest.raises(SuiteFormatError):
            TestCase("t", "f", ())
        with pytest.raises(SuiteFormatError):
            TestCase("t", "f", (), expected_value=1, expected_error="E")


class TestRunSuite:
    def test_gcd_verdicts_and_coverage(self, gcd_program, gcd_suite):
        result = run_suite(gcd_program, gcd_suite)
        assert result.passing == {"zero_u", "coprime"}
        assert result.failing == {"overflow"}
        # the buggy condition is covered by every test
        for test_id in result.verdicts:
            assert result.coverage[test_id][1] == 1

    def test_empty_suite_rejected(self, gcd_program):
        with pytest.raises(ValueError):
            run_suite(gcd_program, [])

    def test_duplicate_ids_rejected(self, gcd_program):
        tests = [
            TestCase("a", "gcd", (0, 6), expected_value=6),
            TestCase("a", "gcd", (3, 5), expected_value=1),
        ]
        with pytest.raises(SuiteFormatError):
            run_suite(gcd_program, tests)

    def test_verdict_stability(self, gcd_program, gcd_suite):
        first = run_suite(gcd_program, gcd_suite)
        second = run_suite(gcd_program, gcd_suite)
        assert first.verdicts == second.verdicts
        assert first.coverage == second.coverage

    def test_coverage_soundness(self, gcd_program, gcd_suite):
        result = run_suite(gcd_program, gcd_suite)
        for test_id, hits in result.coverage.items():
            execution = result.executions[test_id]
            for loc, count in hits.items():
                assert count == execution.hits.get(loc, 0)


class TestSuiteFormat:
    def test_parse_literal_calls(self):
        suite = parse_suite(
            "# comment\n"
            "a: gcd(0, 6) -> 6\n"
            "b: f(Str(\"ab\"), null, -2) -> error NullDereference\n"
            "c: g(1.5, true) -> 0.25\n"
        )
        assert [t.id for t in suite] == ["a", "b", "c"]
        assert suite[1].args == (Obj("Str", "ab"), NULL, -2)
        assert suite[1].expected_error == "NullDereference"
        assert suite[2].expected_value == 0.25

    def test_round_trip(self):
        text = "a: gcd(0, 6) -> 6\nb: f(null) -> error Boom\n"
        assert render_suite(parse_suite(text)) == text

    def test_malformed_line_reports_position(self):
        with pytest.raises(SuiteFormatError, match="line 1"):
            parse_suite("not a test line\n")

    def test_empty_file_rejected(self):
        with pytest.raises(SuiteFormatError):
            parse_suite("# nothing here\n")
