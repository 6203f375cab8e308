"""MiniLang: AST, text format, and instrumentable interpreter."""

from .ast import (
    AssignStmt, Binary, BoolLit, CallExpr, CallStmt, ConstDef, Expr,
    FunctionDef, IfStmt, IntLit, LetStmt, MethodCall, NullLit, Param,
    Program, RealLit, ReturnStmt, StatementKind, Stmt, ThrowStmt, Unary,
    VarRef, WhileStmt,
)
from .interp import (
    DEFAULT_STEP_BUDGET, ExecutionControls, ExecutionResult, NO_CONTROLS,
    ProbeSnapshot, TIMEOUT, execute,
)
from .parser import (
    parse_call, parse_expression, parse_program, parse_value_literal,
    resolve_expr,
)
from .patching import Patch, PatchKind, apply_patch
from .printer import render_expr, render_program
from .registry import QueryMethod, StateQueryRegistry, default_registry
from .values import (
    INT_MAX, INT_MIN, NULL, Null, Obj, Value, format_real, format_value,
    type_of, wrap_int,
)

__all__ = [
    "AssignStmt", "Binary", "BoolLit", "CallExpr", "CallStmt", "ConstDef",
    "Expr", "FunctionDef", "IfStmt", "IntLit", "LetStmt", "MethodCall",
    "NullLit", "Param", "Program", "RealLit", "ReturnStmt", "StatementKind",
    "Stmt", "ThrowStmt", "Unary", "VarRef", "WhileStmt",
    "DEFAULT_STEP_BUDGET", "ExecutionControls", "ExecutionResult",
    "NO_CONTROLS", "ProbeSnapshot", "TIMEOUT", "execute",
    "parse_call", "parse_expression", "parse_program", "parse_value_literal",
    "resolve_expr",
    "Patch", "PatchKind", "apply_patch",
    "render_expr", "render_program",
    "QueryMethod", "StateQueryRegistry", "default_registry",
    "INT_MAX", "INT_MIN", "NULL", "Null", "Obj", "Value", "format_real",
    "format_value", "type_of", "wrap_int",
]
