"""Patch expressions and model decoding.

Decoding walks backward from the result slot: the producer at a slot is
either an input column (a leaf) or a component whose argument slots are
decoded recursively. Equal models decode to byte-identical renderings;
redundant forms such as ``!(x == null)`` are preserved, never simplified.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple, Union

from ..errors import InternalConsistencyError
from ..minilang import (
    Binary, CallExpr, Expr, IntLit, MethodCall, NullLit, Unary, VarRef,
)
from ..minilang.printer import render_expr
from ..trace import ColumnSpec
from .components import Component
from .problem import SynthesisProblem


@dataclass(frozen=True)
class Leaf:
    column: ColumnSpec


@dataclass(frozen=True)
class App:
    component: Component
    args: Tuple["PatchExpression", ...]


PatchExpression = Union[Leaf, App]


def evaluate(expr: PatchExpression, values: Dict[str, object]):
    """Evaluate over named column values (total; no runtime errors)."""
    if isinstance(expr, Leaf):
        return values[expr.column.name]
    return expr.component.evaluate([evaluate(a, values) for a in expr.args])


def size(expr: PatchExpression) -> int:
    if isinstance(expr, Leaf):
        return 1
    return 1 + sum(size(a) for a in expr.args)


def to_source(expr: PatchExpression) -> str:
    """Human-readable text; labeled components print call-style."""
    return render_expr(to_minilang(expr))


def to_minilang(expr: PatchExpression) -> Expr:
    """Convert into a MiniLang expression suitable for a Patch."""
    if isinstance(expr, Leaf):
        col = expr.column
        if col.kind == "var":
            return VarRef(col.var)
        if col.kind == "const":
            return IntLit(col.const)
        if col.kind == "nullcheck":
            return Binary("==", VarRef(col.var), NullLit())
        if col.kind == "query":
            return MethodCall(col.var, col.method)
        raise ValueError(f"column {col.name!r} has no expression recipe")
    comp = expr.component
    args = tuple(to_minilang(a) for a in expr.args)
    if comp.label is not None:
        # Opaque component: render call-style under its display name.
        return CallExpr(comp.label, args)
    if comp.tag == "!":
        return Unary("!", args[0])
    return Binary(comp.tag, args[0], args[1])


def decode(problem: SynthesisProblem, model: Dict[str, int]) -> PatchExpression:
    """Backward traversal from the result slot to a deterministic expression.

    Raises InternalConsistencyError when the model violates the structural
    constraints, which indicates an encoder or solver bug.
    """
    violations = problem.check_model(model)
    if violations:
        raise InternalConsistencyError("; ".join(violations))

    producer_at: Dict[int, Tuple[str, int]] = {
        i + 1: ("col", i) for i in range(problem.num_inputs)
    }
    for i, e in enumerate(problem.output_elements):
        producer_at[model[e.name]] = ("comp", e.component_index)

    def traverse(slot: int) -> PatchExpression:
        role, index = producer_at[slot]
        if role == "col":
            return Leaf(problem.columns[index])
        comp = problem.components[index]
        args = tuple(
            traverse(model[f"l_arg_{comp.uid}_{k}"]) for k in range(comp.arity)
        )
        return App(comp, args)

    return traverse(model["l_result"])
