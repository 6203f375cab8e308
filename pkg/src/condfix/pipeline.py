"""End-to-end repair: localize, force, trace, synthesize, apply, validate.

Statements are visited in suspiciousness order. For each candidate the
kind follows the statement kind (if statements get condition updates,
plain statements get preconditions). A candidate advances through the
angelic, trace, and synthesis phases; the ladder of difficulty levels is
climbed until the first satisfiable rung whose decoded expression also
survives whole-suite validation. The first validated patch wins.

When nothing validates, the report carries one reason:

  no-angelic-value    nothing got past angelic localization
  execution-timeout   a forced run exhausted the step budget
  conflicting-trace   some trace matrix demanded two outcomes for one input
  synthesis-timeout   some solver call timed out or a rung went unanswered
  exhausted           the ranking or the global time budget ran out

with later phases taking precedence, since they carry more information.
"""
from __future__ import annotations

import difflib
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .angelic import (
    BUDGET_EXHAUSTED, AngelicOutcome, angelic_condition, angelic_precondition,
)
from .errors import NoFailingTestError
from .faultloc import build_spectrum, rank
from .minilang import (
    DEFAULT_STEP_BUDGET, Patch, PatchKind, Program, StatementKind,
    apply_patch, render_program,
)
from .synth import decode, encode, solve, to_minilang
from .synth.internal import SAT, TIMEOUT, UNSAT
from .testkit import TestCase, run_suite
from .trace import CONDITION, PRECONDITION, collect, deduplicate

NO_ANGELIC_VALUE = "no-angelic-value"
EXECUTION_TIMEOUT = "execution-timeout"
CONFLICTING_TRACE = "conflicting-trace"
SYNTHESIS_TIMEOUT = "synthesis-timeout"
EXHAUSTED = "exhausted"

_REASON_PRIORITY = [
    NO_ANGELIC_VALUE,
    EXECUTION_TIMEOUT,
    CONFLICTING_TRACE,
    SYNTHESIS_TIMEOUT,
]


@dataclass
class RepairConfig:
    mode: str = "both"  # condition | precondition | both
    metric: str = "ochiai"
    level_timeout: float = 60.0
    global_timeout: float = 300.0
    step_budget: int = DEFAULT_STEP_BUDGET
    max_level: int = 4
    solver_cmd: Optional[str] = None  # None selects the internal backend
    solver_nodes: int = 2_000_000

    def __post_init__(self):
        if self.mode not in ("condition", "precondition", "both"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.level_timeout <= 0 or self.global_timeout <= 0:
            raise ValueError("timeouts must be positive")


@dataclass
class LevelTrial:
    level: int
    status: str  # sat | unsat | timeout | invalid-patch
    seconds: float


@dataclass
class LocationTrial:
    loc: int
    rank: int
    kind: str
    status: str  # reason string or "patched"
    angelic_tuples: List[dict] = field(default_factory=list)
    levels: List[LevelTrial] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "location": self.loc,
            "rank": self.rank,
            "kind": self.kind,
            "status": self.status,
            "angelic_tuples": self.angelic_tuples,
            "levels": [
                {"level": l.level, "status": l.status, "seconds": round(l.seconds, 3)}
                for l in self.levels
            ],
        }


@dataclass
class RepairReport:
    outcome: str  # patched | no-patch
    reason: Optional[str] = None
    patch: Optional[Patch] = None
    level: Optional[int] = None
    location_rank: Optional[int] = None
    wall_time: float = 0.0
    trials: List[LocationTrial] = field(default_factory=list)

    @property
    def patched(self) -> bool:
        return self.outcome == "patched"

    def to_dict(self) -> dict:
        body = {
            "outcome": self.outcome,
            "reason": self.reason,
            "patch": None,
            "level": self.level,
            "location_rank": self.location_rank,
            "wall_time": round(self.wall_time, 3),
            "trials": [t.to_dict() for t in self.trials],
        }
        if self.patch is not None:
            body["patch"] = {
                "kind": self.patch.kind.value,
                "location": self.patch.location,
                "expression": self.patch.expression_text,
            }
        return body


def validate(program: Program, patch: Patch, suite: Sequence[TestCase],
             step_budget: int = DEFAULT_STEP_BUDGET) -> bool:
    """Whole-suite re-execution on the patched program; true iff nothing fails."""
    patched = apply_patch(program, patch)
    return run_suite(patched, suite, step_budget=step_budget).all_pass()


def repair(program: Program, suite: Sequence[TestCase], config: Optional[RepairConfig] = None) -> RepairReport:
    config = config or RepairConfig()
    started = time.monotonic()

    baseline = run_suite(program, suite, step_budget=config.step_budget)
    if not baseline.failing:
        raise NoFailingTestError("repair requires at least one failing test")
    failing = sorted(baseline.failing)

    spectrum = build_spectrum(baseline, program.locations())
    ranking = rank(spectrum, config.metric)

    trials: List[LocationTrial] = []
    for position, (loc, _score) in enumerate(ranking.entries, start=1):
        if time.monotonic() - started > config.global_timeout:
            return _no_patch(EXHAUSTED, trials, started)
        kind = _repair_kind(program, loc, config.mode)
        if kind is None:
            continue
        trial = LocationTrial(loc=loc, rank=position, kind=kind, status="")
        trials.append(trial)

        outcome = _angelic_phase(program, suite, failing, loc, kind, config)
        if not outcome.found:
            trial.status = (
                EXECUTION_TIMEOUT if outcome.reason == BUDGET_EXHAUSTED else NO_ANGELIC_VALUE
            )
            continue
        trial.angelic_tuples = [
            {"loc": t.loc, "val": t.val, "test": t.test}
            for t in outcome.tuples.values()
        ]

        matrix = deduplicate(
            collect(program, suite, loc, kind, outcome.tuples, config.step_budget)
        )
        if matrix.conflicting:
            trial.status = CONFLICTING_TRACE
            continue

        patch = _synthesis_ladder(program, suite, matrix, kind, trial, config, started)
        if patch is not None:
            wall = time.monotonic() - started
            return RepairReport(
                outcome="patched",
                patch=patch,
                level=trial.levels[-1].level,
                location_rank=position,
                wall_time=wall,
                trials=trials,
            )
        if not trial.status:
            trial.status = SYNTHESIS_TIMEOUT

    return _no_patch(None, trials, started)


def _no_patch(forced_reason: Optional[str], trials: List[LocationTrial], started: float) -> RepairReport:
    reason = forced_reason
    if reason is None:
        reason = EXHAUSTED
        for candidate in _REASON_PRIORITY:
            if any(t.status == candidate for t in trials):
                reason = candidate
    return RepairReport(
        outcome="no-patch",
        reason=reason,
        wall_time=time.monotonic() - started,
        trials=trials,
    )


def _repair_kind(program: Program, loc: int, mode: str) -> Optional[str]:
    kind = program.kind_of(loc)
    if kind == StatementKind.IF and mode in ("condition", "both"):
        return CONDITION
    if kind == StatementKind.PLAIN and mode in ("precondition", "both"):
        return PRECONDITION
    return None


def _angelic_phase(program, suite, failing, loc, kind, config) -> AngelicOutcome:
    if kind == CONDITION:
        return angelic_condition(program, suite, failing, loc, config.step_budget)
    return angelic_precondition(program, suite, failing, loc, config.step_budget)


def _synthesis_ladder(program, suite, matrix, kind, trial, config, started) -> Optional[Patch]:
    saw_timeout = False
    for level in range(1, config.max_level + 1):
        if time.monotonic() - started > config.global_timeout:
            trial.status = SYNTHESIS_TIMEOUT if saw_timeout else EXHAUSTED
            return None
        level_started = time.monotonic()
        problem = encode(matrix, level)
        result = solve(problem, config.solver_cmd, config.level_timeout, config.solver_nodes)
        elapsed = time.monotonic() - level_started
        if result.status == UNSAT:
            trial.levels.append(LevelTrial(level, UNSAT, elapsed))
            continue
        if result.status == TIMEOUT:
            trial.levels.append(LevelTrial(level, TIMEOUT, elapsed))
            saw_timeout = True
            continue
        expression = decode(problem, result.model)
        if not problem.satisfies_rows(result.model):
            # An external backend may answer sat with a junk model; treat it
            # like an unanswered rung rather than trusting it.
            trial.levels.append(LevelTrial(level, "invalid-patch", elapsed))
            saw_timeout = True
            continue
        patch_kind = (
            PatchKind.CONDITION_UPDATE if kind == CONDITION
            else PatchKind.PRECONDITION_ADDITION
        )
        patch = Patch(patch_kind, matrix.location, to_minilang(expression))
        if validate(program, patch, suite, config.step_budget):
            trial.levels.append(LevelTrial(level, SAT, elapsed))
            trial.status = "patched"
            return patch
        trial.levels.append(LevelTrial(level, "invalid-patch", elapsed))
    if saw_timeout:
        trial.status = SYNTHESIS_TIMEOUT
    else:
        trial.status = EXHAUSTED
    return None


def render_patch_diff(program: Program, patch: Patch) -> str:
    """Unified diff of the canonical program text against the patched text."""
    before = render_program(program).splitlines(keepends=True)
    after = render_program(apply_patch(program, patch)).splitlines(keepends=True)
    diff = difflib.unified_diff(before, after, fromfile="a/program.ml", tofile="b/program.ml")
    return "".join(diff)
