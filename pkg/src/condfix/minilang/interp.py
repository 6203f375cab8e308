"""Instrumentable tree-walking interpreter.

Supports three execution controls: forcing condition outcomes, skipping
plain statements, and probe-based state capture. Runtime failures (null
dereference, division by zero, thrown errors, exhausted step budget) are
reported inside the ExecutionResult, never raised to the caller.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

from ..errors import ControlError
from .ast import (
    AssignStmt, Binary, BoolLit, CallExpr, CallStmt, Expr, IfStmt, IntLit,
    LetStmt, MethodCall, NullLit, Program, RealLit, ReturnStmt, StatementKind,
    Stmt, ThrowStmt, Unary, VarRef, WhileStmt,
)
from .values import NULL, Null, Obj, Value, matches_declared, wrap_int

DEFAULT_STEP_BUDGET = 1_000_000

# Builtin runtime error names; user throws share the same namespace.
NULL_DEREFERENCE = "NullDereference"
DIVISION_BY_ZERO = "DivisionByZero"
MISSING_RETURN = "MissingReturn"
UNBOUND_VARIABLE = "UnboundVariable"
TYPE_MISMATCH = "TypeMismatch"
TIMEOUT = "TimeoutDuringExecution"


@dataclass(frozen=True)
class ExecutionControls:
    """Per-execution instrumentation.

    condition_overrides forces the outcome of an if (or while) condition to
    a constant for the whole execution; skip_set suppresses plain statements
    entirely (no hit, no side effect); probes capture a state snapshot on
    every hit of a location.
    """

    condition_overrides: Mapping[int, bool] = field(default_factory=dict)
    skip_set: frozenset = frozenset()
    probes: frozenset = frozenset()

    def validate(self, program: Program) -> None:
        for loc in self.condition_overrides:
            if program.kind_of(loc) == StatementKind.PLAIN:
                raise ControlError(f"cannot override condition of plain statement {loc}")
        for loc in self.skip_set:
            if program.kind_of(loc) != StatementKind.PLAIN:
                raise ControlError(f"can only skip plain statements, not {loc}")
        for loc in self.probes:
            program.statement_at(loc)


NO_CONTROLS = ExecutionControls()


@dataclass
class ProbeSnapshot:
    """State at one hit of a probed location: raw in-scope values, nullness
    of class-typed bindings, and state-query results for non-null objects
    (keyed ``name.method()``)."""

    values: Dict[str, Value]
    null_flags: Dict[str, bool]
    queries: Dict[str, Value]


@dataclass
class ExecutionResult:
    value: Optional[Value] = None
    error: Optional[str] = None
    timed_out: bool = False
    hits: Dict[int, int] = field(default_factory=dict)
    snapshots: Dict[int, List[ProbeSnapshot]] = field(default_factory=dict)
    cond_values: Dict[int, List[bool]] = field(default_factory=dict)
    steps: int = 0

    @property
    def ok(self) -> bool:
        return self.error is None


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class _Throw(Exception):
    def __init__(self, name):
        self.name = name


class _Timeout(Exception):
    pass


class _Env:
    """Block-structured environment chained to an enclosing scope."""

    __slots__ = ("bindings", "parent")

    def __init__(self, parent=None):
        self.bindings: Dict[str, Value] = {}
        self.parent = parent

    def declare(self, name, value):
        self.bindings[name] = value

    def lookup(self, name):
        env = self
        while env is not None:
            if name in env.bindings:
                return env.bindings[name]
            env = env.parent
        raise _Throw(UNBOUND_VARIABLE)

    def assign(self, name, value):
        env = self
        while env is not None:
            if name in env.bindings:
                env.bindings[name] = value
                return
            env = env.parent
        raise _Throw(UNBOUND_VARIABLE)

    def flatten(self) -> Dict[str, Value]:
        chain = []
        env = self
        while env is not None:
            chain.append(env.bindings)
            env = env.parent
        merged: Dict[str, Value] = {}
        for bindings in reversed(chain):
            merged.update(bindings)
        return merged


class _Interpreter:
    def __init__(self, program: Program, controls: ExecutionControls, budget: int):
        self.program = program
        self.controls = controls
        self.budget = budget
        self.result = ExecutionResult()

    def step(self):
        self.result.steps += 1
        if self.result.steps > self.budget:
            raise _Timeout()

    def run(self, fn_name: str, args: Sequence[Value]) -> ExecutionResult:
        try:
            self.result.value = self.call_function(fn_name, list(args))
        except _Throw as t:
            self.result.error = t.name
        except _Timeout:
            self.result.error = TIMEOUT
            self.result.timed_out = True
        return self.result

    def call_function(self, fn_name: str, args: List[Value]) -> Value:
        fn = self.program.functions[fn_name]
        if len(args) != len(fn.params):
            raise ValueError(
                f"{fn_name}() takes {len(fn.params)} arguments, got {len(args)}"
            )
        env = _Env()
        for param, arg in zip(fn.params, args):
            if not matches_declared(arg, param.type):
                raise _Throw(TYPE_MISMATCH)
            env.declare(param.name, arg)
        try:
            self.exec_block(fn.body, env)
        except _Return as r:
            return r.value
        raise _Throw(MISSING_RETURN)

    def exec_block(self, stmts: List[Stmt], env: _Env) -> None:
        for stmt in stmts:
            self.exec_stmt(stmt, env)

    def exec_stmt(self, stmt: Stmt, env: _Env) -> None:
        loc = stmt.loc
        if loc in self.controls.skip_set:
            return
        self.step()
        if isinstance(stmt, IfStmt):
            self.record_hit(loc, env)
            cond = self.condition_value(stmt.cond, loc, env)
            self.result.cond_values.setdefault(loc, []).append(cond)
            branch = stmt.then_body if cond else stmt.else_body
            self.exec_block(branch, _Env(env))
        elif isinstance(stmt, WhileStmt):
            while True:
                self.record_hit(loc, env)
                cond = self.condition_value(stmt.cond, loc, env)
                self.result.cond_values.setdefault(loc, []).append(cond)
                if not cond:
                    break
                self.exec_block(stmt.body, _Env(env))
                self.step()
        else:
            self.record_hit(loc, env)
            if isinstance(stmt, LetStmt):
                env.declare(stmt.name, self.eval_expr(stmt.value, env))
            elif isinstance(stmt, AssignStmt):
                env.assign(stmt.name, self.eval_expr(stmt.value, env))
            elif isinstance(stmt, ReturnStmt):
                raise _Return(self.eval_expr(stmt.value, env))
            elif isinstance(stmt, ThrowStmt):
                raise _Throw(stmt.error)
            elif isinstance(stmt, CallStmt):
                self.eval_expr(stmt.call, env)
            else:
                raise TypeError(f"not a statement node: {stmt!r}")

    def condition_value(self, cond: Expr, loc: int, env: _Env) -> bool:
        # A forced condition replaces evaluation of the original expression.
        if loc in self.controls.condition_overrides:
            return self.controls.condition_overrides[loc]
        value = self.eval_expr(cond, env)
        if not isinstance(value, bool):
            raise _Throw(TYPE_MISMATCH)
        return value

    def record_hit(self, loc: int, env: _Env) -> None:
        self.result.hits[loc] = self.result.hits.get(loc, 0) + 1
        if loc in self.controls.probes:
            self.result.snapshots.setdefault(loc, []).append(self.snapshot(env))

    def snapshot(self, env: _Env) -> ProbeSnapshot:
        values = {c.name: c.value for c in self.program.consts.values()}
        values.update(env.flatten())
        null_flags: Dict[str, bool] = {}
        queries: Dict[str, Value] = {}
        for name, value in values.items():
            if isinstance(value, Null):
                null_flags[name] = True
            elif isinstance(value, Obj):
                null_flags[name] = False
                for method in self.program.registry.methods_for(value.cls).values():
                    queries[f"{name}.{method.name}()"] = method.fn(value.payload)
        return ProbeSnapshot(values, null_flags, queries)

    # -- expression evaluation --

    def eval_expr(self, expr: Expr, env: _Env) -> Value:
        self.step()
        if isinstance(expr, IntLit):
            return expr.value
        if isinstance(expr, RealLit):
            return expr.value
        if isinstance(expr, BoolLit):
            return expr.value
        if isinstance(expr, NullLit):
            return NULL
        if isinstance(expr, VarRef):
            if expr.name in self.program.consts:
                return self.program.consts[expr.name].value
            return env.lookup(expr.name)
        if isinstance(expr, Unary):
            return self.eval_unary(expr, env)
        if isinstance(expr, Binary):
            return self.eval_binary(expr, env)
        if isinstance(expr, MethodCall):
            receiver = self.eval_expr(VarRef(expr.receiver), env)
            if isinstance(receiver, Null):
                raise _Throw(NULL_DEREFERENCE)
            if not isinstance(receiver, Obj):
                raise _Throw(TYPE_MISMATCH)
            method = self.program.registry.lookup(receiver.cls, expr.method)
            return method.fn(receiver.payload)
        if isinstance(expr, CallExpr):
            args = [self.eval_expr(a, env) for a in expr.args]
            return self.call_function(expr.func, args)
        raise TypeError(f"not an expression node: {expr!r}")

    def eval_unary(self, expr: Unary, env: _Env) -> Value:
        value = self.eval_expr(expr.operand, env)
        if expr.op == "!":
            if not isinstance(value, bool):
                raise _Throw(TYPE_MISMATCH)
            return not value
        if expr.op == "-":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise _Throw(TYPE_MISMATCH)
            return wrap_int(-value) if isinstance(value, int) else -value
        raise TypeError(f"unknown unary operator {expr.op!r}")

    def eval_binary(self, expr: Binary, env: _Env) -> Value:
        op = expr.op
        if op in ("&&", "||"):
            left = self.eval_expr(expr.left, env)
            if not isinstance(left, bool):
                raise _Throw(TYPE_MISMATCH)
            if op == "&&" and not left:
                return False
            if op == "||" and left:
                return True
            right = self.eval_expr(expr.right, env)
            if not isinstance(right, bool):
                raise _Throw(TYPE_MISMATCH)
            return right

        left = self.eval_expr(expr.left, env)
        right = self.eval_expr(expr.right, env)
        if op in ("==", "!="):
            return self.equality(left, right, op == "==")

        left_int = isinstance(left, int) and not isinstance(left, bool)
        right_int = isinstance(right, int) and not isinstance(right, bool)
        both_int = left_int and right_int
        both_real = isinstance(left, float) and isinstance(right, float)
        if not (both_int or both_real):
            raise _Throw(TYPE_MISMATCH)

        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        if op == ">=":
            return left >= right
        if op == "+":
            return wrap_int(left + right) if both_int else left + right
        if op == "-":
            return wrap_int(left - right) if both_int else left - right
        if op == "*":
            return wrap_int(left * right) if both_int else left * right
        if op == "/":
            if both_int:
                if right == 0:
                    raise _Throw(DIVISION_BY_ZERO)
                q = abs(left) // abs(right)
                return wrap_int(q if (left >= 0) == (right >= 0) else -q)
            if right == 0.0:
                raise _Throw(DIVISION_BY_ZERO)
            return left / right
        if op == "%":
            if not both_int:
                raise _Throw(TYPE_MISMATCH)
            if right == 0:
                raise _Throw(DIVISION_BY_ZERO)
            r = abs(left) % abs(right)
            return wrap_int(r if left >= 0 else -r)
        raise TypeError(f"unknown binary operator {op!r}")

    @staticmethod
    def equality(left: Value, right: Value, positive: bool) -> bool:
        if isinstance(left, Null) or isinstance(right, Null) or \
                isinstance(left, Obj) or isinstance(right, Obj):
            eq = left is right if (isinstance(left, Null) or isinstance(right, Null)) \
                else left == right
        else:
            left_is_bool = isinstance(left, bool)
            right_is_bool = isinstance(right, bool)
            if left_is_bool != right_is_bool:
                raise _Throw(TYPE_MISMATCH)
            if not left_is_bool:
                left_num = isinstance(left, (int, float))
                right_num = isinstance(right, (int, float))
                if not (left_num and right_num) or (isinstance(left, float) != isinstance(right, float)):
                    raise _Throw(TYPE_MISMATCH)
            eq = left == right
        return eq if positive else not eq


def execute(
    program: Program,
    function: str,
    args: Sequence[Value],
    controls: Optional[ExecutionControls] = None,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> ExecutionResult:
    """Run one function call under the given controls.

    Runtime errors and budget exhaustion are captured in the result; hits,
    snapshots, and condition values collected before a failure are kept.
    """
    controls = controls or NO_CONTROLS
    controls.validate(program)
    if function not in program.functions:
        raise ValueError(f"undefined function {function!r}")
    return _Interpreter(program, controls, step_budget).run(function, args)
