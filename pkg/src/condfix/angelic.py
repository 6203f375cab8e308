"""Angelic fix localization.

For a candidate if statement, each failing test is re-run twice, once with
the condition forced to true and once forced to false; for a candidate
plain statement, each failing test is re-run once with the statement
skipped. A location qualifies when every failing test passes under some
forced decision. The forced value is constant for the whole test
execution; per-evaluation value sequences are deliberately out of scope.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

from .minilang import (
    DEFAULT_STEP_BUDGET, ExecutionControls, Program, StatementKind, execute,
)
from .testkit import TestCase, verdict_holds

NO_VALUE_WORKS = "no-value-works"
BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class AngelicTuple:
    loc: int
    val: bool
    test: str


@dataclass(frozen=True)
class Trial:
    loc: int
    test: str
    forced: Optional[bool]  # None means the statement was skipped
    passed: bool
    timed_out: bool


@dataclass
class AngelicOutcome:
    tuples: Optional[Dict[str, AngelicTuple]]  # test id -> tuple when found
    reason: Optional[str] = None  # NO_VALUE_WORKS | BUDGET_EXHAUSTED
    trials: List[Trial] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.tuples is not None


def _index_tests(suite: Sequence[TestCase], failing: Iterable[str]) -> List[TestCase]:
    by_id = {t.id: t for t in suite}
    missing = [t for t in failing if t not in by_id]
    if missing:
        raise KeyError(f"unknown failing test ids: {missing}")
    return [by_id[t] for t in sorted(failing)]


def _run_trial(program, test, controls, step_budget):
    result = execute(program, test.function, list(test.args), controls, step_budget)
    return verdict_holds(result, test), result.timed_out


def angelic_condition(
    program: Program,
    suite: Sequence[TestCase],
    failing: Iterable[str],
    loc: int,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> AngelicOutcome:
    """Search for per-test forced condition values that pass every failing
    test. When both forced values pass a test, true is recorded."""
    if program.kind_of(loc) != StatementKind.IF:
        raise ValueError(f"location {loc} is not an if statement")
    tests = _index_tests(suite, failing)
    if not tests:
        raise ValueError("at least one failing test is required")

    trials: List[Trial] = []
    tuples: Dict[str, AngelicTuple] = {}
    any_timeout = False
    all_covered = True
    for test in tests:
        chosen: Optional[bool] = None
        for forced in (True, False):
            controls = ExecutionControls(condition_overrides={loc: forced})
            passed, timed_out = _run_trial(program, test, controls, step_budget)
            trials.append(Trial(loc, test.id, forced, passed, timed_out))
            any_timeout = any_timeout or timed_out
            if passed and chosen is None:
                chosen = forced
        if chosen is None:
            all_covered = False
        else:
            tuples[test.id] = AngelicTuple(loc, chosen, test.id)

    if all_covered:
        return AngelicOutcome(tuples=tuples, trials=trials)
    reason = BUDGET_EXHAUSTED if any_timeout else NO_VALUE_WORKS
    return AngelicOutcome(tuples=None, reason=reason, trials=trials)


def angelic_precondition(
    program: Program,
    suite: Sequence[TestCase],
    failing: Iterable[str],
    loc: int,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> AngelicOutcome:
    """Skip the statement during each failing test; found iff all pass.
    Every recorded tuple carries the value false (statement skipped)."""
    if program.kind_of(loc) != StatementKind.PLAIN:
        raise ValueError(f"location {loc} is not a plain statement")
    tests = _index_tests(suite, failing)
    if not tests:
        raise ValueError("at least one failing test is required")

    trials: List[Trial] = []
    tuples: Dict[str, AngelicTuple] = {}
    any_timeout = False
    all_passed = True
    controls = ExecutionControls(skip_set=frozenset({loc}))
    for test in tests:
        passed, timed_out = _run_trial(program, test, controls, step_budget)
        trials.append(Trial(loc, test.id, None, passed, timed_out))
        any_timeout = any_timeout or timed_out
        if passed:
            tuples[test.id] = AngelicTuple(loc, False, test.id)
        else:
            all_passed = False

    if all_passed:
        return AngelicOutcome(tuples=tuples, trials=trials)
    reason = BUDGET_EXHAUSTED if any_timeout else NO_VALUE_WORKS
    return AngelicOutcome(tuples=None, reason=reason, trials=trials)


def search_space_size(program: Program, kind: str, covered: Iterable[int]) -> int:
    """Size of the single-value angelic search space for one failing test:
    two trials per covered if statement, one per covered plain statement."""
    covered = set(covered)
    if kind == "condition":
        ifs = [l for l in covered if program.kind_of(l) == StatementKind.IF]
        return 2 * len(ifs)
    if kind == "precondition":
        plains = [l for l in covered if program.kind_of(l) == StatementKind.PLAIN]
        return len(plains)
    raise ValueError(f"unknown repair kind {kind!r}")
