"""Encoding, solving (internal and external), decoding, and the oracle."""
import random
import shutil
import stat
import textwrap
from pathlib import Path

import pytest

from condfix.errors import (
    InternalConsistencyError, SolverBackendError, UnsatisfiableMatrixError,
)
from condfix.synth import (
    Component, decode, emit_smtlib, encode, encode_with_components,
    enumerate_oracle, evaluate, solve, solve_external, to_source,
    tree_to_source,
)
from condfix.synth.internal import SAT, TIMEOUT, UNSAT, solve_internal
from condfix.trace import ColumnSpec, TraceMatrix, TraceRow

DATA = Path(__file__).parent / "data"


def int_col(name):
    return ColumnSpec(name, "int", "var", var=name)


def bool_col(name):
    return ColumnSpec(name, "bool", "var", var=name)


def matrix(columns, rows, loc=1, kind="condition"):
    trace_rows = [TraceRow(f"t{i}", 0, tuple(r[:-1]), r[-1]) for i, r in enumerate(rows)]
    return TraceMatrix(loc, kind, columns, trace_rows)


def running_example_problem():
    """Inputs: an integer variable, a false constant, the constant 3;
    components: f1 over one bool, f2 over two ints."""
    cols = [
        int_col("i0"),
        ColumnSpec("c1", "bool", "var", var="c1"),
        ColumnSpec("c2", "int", "const", const=3),
    ]
    rows = [(1, False, 3, True), (7, False, 3, True), (-2, False, 3, True)]
    f1 = Component("!", ("bool",), "bool", label="f1")
    f2 = Component("==", ("int", "int"), "bool", label="f2")
    return encode_with_components(matrix(cols, rows), [f1, f2])


class TestEncoding:
    def test_running_example_domains(self):
        problem = running_example_problem()
        fixed = problem.fixed_assignment()
        assert fixed["l_in1"] == 1
        assert fixed["l_in2"] == 2
        assert fixed["l_in3"] == 3
        assert fixed["l_result"] == 5
        assert problem.output_slot_range() == (4, 5)
        f1_port = problem.port_elements[0]
        assert problem.port_candidates(f1_port) == [
            "l_in2", "l_out_f1_bool_0", "l_out_f2_int_int_0",
        ]
        for port in problem.port_elements[1:]:
            assert problem.port_candidates(port) == ["l_in1", "l_in3"]

    def test_identity_solvable_without_components(self):
        m = matrix([bool_col("flag")], [(True, True), (False, False)])
        problem = encode_with_components(m, [])
        result = solve(problem, None, 5.0)
        assert result.is_sat
        assert to_source(decode(problem, result.model)) == "flag"

    def test_conflicting_matrix_fails_fast(self):
        m = matrix([int_col("x")], [(1, True), (1, False)])
        from condfix.trace import deduplicate

        with pytest.raises(UnsatisfiableMatrixError):
            encode(deduplicate(m), 1)

    def test_width_required(self):
        m = matrix([], [])
        with pytest.raises(ValueError):
            encode(m, 1)


class TestInternalSolve:
    def test_level1_pair(self):
        m = matrix([int_col("a"), int_col("b")], [(1, 2, True), (3, 2, False)])
        problem = encode(m, 1)
        result = solve(problem, None, 10.0)
        assert result.is_sat
        text = to_source(decode(problem, result.model))
        assert text in ("a < b", "a <= b")

    def test_unsat_when_no_expression_exists(self):
        # same single int column cannot separate equal inputs; conflict is
        # caught earlier, so use rows separable only by parity
        m = matrix([int_col("x")], [(2, True), (4, False)])
        problem = encode(m, 1)
        result = solve(problem, None, 10.0)
        # x<const forms can separate 2 from 4; craft a truly unsat case:
        m2 = matrix(
            [int_col("x")],
            [(1, True), (2, False), (3, True)],  # non-monotone in x
        )
        result2 = solve(encode(m2, 1), None, 10.0)
        assert result2.status == UNSAT

    def test_deterministic_model(self):
        m = matrix([int_col("a"), int_col("b")], [(1, 2, True), (3, 2, False)])
        problem = encode(m, 1)
        first = solve(problem, None, 10.0)
        second = solve(problem, None, 10.0)
        assert first.model == second.model

    def test_node_budget_reports_timeout(self):
        cols = [int_col(f"c{i}") for i in range(6)]
        rows = [
            tuple(random.Random(i).randint(-5, 5) for _ in range(6)) + (i % 2 == 0,)
            for i in range(12)
        ]
        problem = encode(matrix(cols, rows), 2)
        result = solve_internal(problem, timeout_s=None, max_nodes=50)
        assert result.status in (TIMEOUT, SAT)  # tiny budget cannot prove unsat

    def test_structural_validity_of_models(self):
        m = matrix(
            [int_col("a"), int_col("b"), bool_col("p")],
            [(1, 2, True, True), (3, 2, False, False), (0, 0, True, True)],
        )
        problem = encode(m, 2)
        result = solve(problem, None, 10.0)
        assert result.is_sat
        assert problem.check_model(result.model) == []


class TestDecode:
    def test_paper_model_prints_f2_of_i0_i0(self):
        problem = running_example_problem()
        model = dict(problem.fixed_assignment())
        model["l_out_f1_bool_0"] = 4
        model["l_out_f2_int_int_0"] = 5
        model["l_arg_f1_bool_0_0"] = 2
        model["l_arg_f2_int_int_0_0"] = 1
        model["l_arg_f2_int_int_0_1"] = 1
        assert problem.check_model(model) == []
        expr = decode(problem, model)
        assert to_source(expr) == "f2(i0, i0)"

    def test_running_example_is_sat_and_row_equivalent(self):
        problem = running_example_problem()
        result = solve(problem, None, 10.0)
        assert result.is_sat
        expr = decode(problem, result.model)
        for inputs, expected in problem.rows:
            values = dict(zip([c.name for c in problem.columns], inputs))
            assert evaluate(expr, values) == expected
            # f2(i0, i0) is true on every row; so must the decoded form be
            assert evaluate(expr, values) is True

    def test_identity_wiring_decodes_to_bare_input(self):
        m = matrix([bool_col("x")], [(True, True)])
        problem = encode_with_components(m, [])
        expr = decode(problem, problem.fixed_assignment())
        assert to_source(expr) == "x"

    def test_decoder_determinism(self):
        m = matrix([int_col("a"), int_col("b")], [(1, 2, True), (3, 2, False)])
        problem = encode(m, 1)
        model = solve(problem, None, 10.0).model
        assert to_source(decode(problem, model)) == to_source(decode(problem, model))

    def test_invalid_model_raises_consistency_error(self):
        problem = running_example_problem()
        model = dict(problem.fixed_assignment())
        model["l_out_f1_bool_0"] = 4
        model["l_out_f2_int_int_0"] = 4  # collision
        model["l_arg_f1_bool_0_0"] = 2
        model["l_arg_f2_int_int_0_0"] = 1
        model["l_arg_f2_int_int_0_1"] = 1
        with pytest.raises(InternalConsistencyError):
            decode(problem, model)

    def test_row_reevaluation_matches_expected(self, gcd_program, gcd_suite):
        from condfix.angelic import angelic_condition
        from condfix.testkit import run_suite
        from condfix.trace import collect, deduplicate

        failing = run_suite(gcd_program, gcd_suite).failing
        outcome = angelic_condition(gcd_program, gcd_suite, failing, 1)
        m = deduplicate(collect(gcd_program, gcd_suite, 1, "condition", outcome.tuples))
        problem = encode(m, 2)
        result = solve(problem, None, 30.0)
        assert result.is_sat
        expr = decode(problem, result.model)
        for row in m.rows:
            assert evaluate(expr, m.row_values(row)) == row.expected


class TestEmission:
    def test_byte_reproducible(self):
        m = matrix([int_col("a"), int_col("b")], [(1, 2, True), (3, 2, False)])
        first = emit_smtlib(encode(m, 1))
        second = emit_smtlib(encode(m, 1))
        assert first == second

    def test_golden_script(self):
        m = matrix([int_col("a"), int_col("b")], [(1, 2, True), (3, 2, False)])
        script = emit_smtlib(encode(m, 1))
        golden = (DATA / "level1_pair.smt2").read_text()
        assert script == golden

    def test_script_shape(self):
        m = matrix(
            [int_col("a"), ColumnSpec("r", "real", "var", var="r"), bool_col("p")],
            [(1, 0.5, True, True), (2, -1.5, False, False)],
        )
        script = emit_smtlib(encode(m, 2))
        assert script.startswith("(set-logic ALL)")
        assert script.rstrip().endswith("))")
        assert "(check-sat)" in script
        assert "(get-value" in script
        assert "0.5" in script and "(- 1.5)" in script


def write_stub_solver(path: Path, body: str) -> str:
    path.write_text("#!/usr/bin/env python3\n" + textwrap.dedent(body))
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return str(path)


class TestExternalBackend:
    def make_problem(self):
        m = matrix([bool_col("x")], [(True, True)])
        return encode_with_components(m, [])

    def test_parses_sat_and_model(self, tmp_path):
        problem = self.make_problem()
        stub = write_stub_solver(
            tmp_path / "solver.py",
            """
            print("sat")
            print("((l_in1 1) (l_result 1))")
            """,
        )
        result = solve_external(problem, f"python3 {stub}", 10.0)
        assert result.is_sat
        assert result.model == {"l_in1": 1, "l_result": 1}

    def test_parses_unsat(self, tmp_path):
        problem = self.make_problem()
        stub = write_stub_solver(tmp_path / "solver.py", 'print("unsat")\n')
        assert solve_external(problem, f"python3 {stub}", 10.0).status == UNSAT

    def test_backend_failure_is_not_unsat(self, tmp_path):
        problem = self.make_problem()
        stub = write_stub_solver(
            tmp_path / "solver.py",
            """
            import sys
            sys.exit(3)
            """,
        )
        with pytest.raises(SolverBackendError):
            solve_external(problem, f"python3 {stub}", 10.0)

    def test_garbage_output_is_backend_error(self, tmp_path):
        problem = self.make_problem()
        stub = write_stub_solver(tmp_path / "solver.py", 'print("maybe")\n')
        with pytest.raises(SolverBackendError):
            solve_external(problem, f"python3 {stub}", 10.0)

    def test_wall_clock_timeout(self, tmp_path):
        problem = self.make_problem()
        stub = write_stub_solver(
            tmp_path / "solver.py",
            """
            import time
            time.sleep(5)
            print("sat")
            """,
        )
        assert solve_external(problem, f"python3 {stub}", 0.5).status == TIMEOUT

    @pytest.mark.skipif(shutil.which("z3") is None, reason="no z3 on PATH")
    def test_real_solver_round_trip(self):
        # only runs where a conforming solver is installed
        m = matrix([int_col("a"), int_col("b")], [(1, 2, True), (3, 2, False)])
        problem = encode(m, 1)
        result = solve(problem, "z3 -smt2", 30.0)
        assert result.is_sat
        expr = decode(problem, result.model)
        for inputs, expected in problem.rows:
            values = dict(zip([c.name for c in problem.columns], inputs))
            assert evaluate(expr, values) == expected

    def test_junk_model_is_rejected_by_solve(self, tmp_path):
        # sat with a structurally invalid assignment must not sneak through
        m = matrix([int_col("a"), int_col("b")], [(1, 2, True)])
        problem = encode(m, 1)
        names = problem.location_variables()
        pairs = " ".join(f"({n} 99)" for n in names)
        stub = write_stub_solver(
            tmp_path / "solver.py",
            f"""
            print("sat")
            print("({pairs})")
            """,
        )
        with pytest.raises(SolverBackendError):
            solve(problem, f"python3 {stub}", 10.0)


class TestOracle:
    def test_finds_level1_expression(self):
        m = matrix([int_col("a"), int_col("b")], [(1, 2, True), (3, 2, False)])
        tree = enumerate_oracle(m, 1, 5)
        assert tree is not None
        assert tree_to_source(tree, m) in ("(a < b)", "(a <= b)")

    def test_none_within_bound_at_level1(self):
        m = matrix([int_col("x")], [(1, True), (2, False), (3, True)])
        assert enumerate_oracle(m, 1, 5) is None

    def test_empty_matrix_rejected(self):
        m = matrix([int_col("x")], [])
        with pytest.raises(ValueError):
            enumerate_oracle(m, 1, 5)

    def test_agreement_with_solver(self):
        m = matrix(
            [int_col("a"), int_col("b")],
            [(1, 2, True), (3, 2, False), (0, 5, True), (9, 9, False)],
        )
        tree = enumerate_oracle(m, 1, 5)
        assert tree is not None
        assert solve(encode(m, 1), None, 10.0).is_sat


class TestLevelMonotonicity:
    def test_sat_is_preserved_up_the_ladder(self):
        rng = random.Random(5)
        checked = 0
        for _ in range(40):
            cols = [int_col("a"), int_col("b"), bool_col("p")]
            rows = []
            for _ in range(rng.randint(2, 6)):
                a, b = rng.randint(-4, 4), rng.randint(-4, 4)
                p = rng.random() < 0.5
                rows.append((a, b, p, rng.random() < 0.5))
            m = matrix(cols, rows)
            from condfix.trace import deduplicate

            m = deduplicate(m)
            if m.conflicting:
                continue
            r1 = solve(encode(m, 1), None, 10.0)
            if r1.is_sat:
                checked += 1
                assert solve(encode(m, 2), None, 10.0).is_sat
        assert checked >= 5
