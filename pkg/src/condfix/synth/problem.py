"""Constraint formulation of component-based expression synthesis.

A problem wires a set of typed input columns and a multiset of components
into a single boolean output. Integer location variables assign every
element a slot: columns occupy the fixed slots 1..|inputs| and each
component output takes a distinct slot in (|inputs|, p], where
p = |inputs| + |components|; the synthesized result lives at slot p.
Component inputs refer to earlier, same-typed slots, which makes any
satisfying assignment an acyclic, well-typed wiring. A model satisfies
the problem when, for every recorded row, evaluating the wiring over the
row's column values reproduces the expected outcome.

The final slot must be fed by a bool-typed producer; without that, a
numeric component parked at slot p would leave the result unconstrained.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from ..errors import UnsatisfiableMatrixError
from ..trace import ColumnSpec, TraceMatrix
from .components import BOOL, Component, components_for_level


@dataclass(frozen=True)
class IOElement:
    """One element with a location variable: an input column, a component
    output, or a component input port."""

    name: str  # location variable name
    type: str
    role: str  # column | output | port
    column_index: Optional[int] = None
    component_index: Optional[int] = None
    port_index: Optional[int] = None


@dataclass
class SynthesisProblem:
    columns: List[ColumnSpec]
    rows: List[Tuple[Tuple, bool]]  # (input values, expected outcome)
    components: List[Component]
    location: int = 0
    kind: str = "condition"

    def __post_init__(self):
        self.num_inputs = len(self.columns)
        self.p = self.num_inputs + len(self.components)
        self.column_elements = [
            IOElement(f"l_in{i + 1}", col.type, "column", column_index=i)
            for i, col in enumerate(self.columns)
        ]
        self.output_elements = [
            IOElement(f"l_out_{c.uid}", c.out_type, "output", component_index=i)
            for i, c in enumerate(self.components)
        ]
        self.port_elements = [
            IOElement(
                f"l_arg_{c.uid}_{k}", c.in_types[k], "port",
                component_index=i, port_index=k,
            )
            for i, c in enumerate(self.components)
            for k in range(c.arity)
        ]

    # -- domains -------------------------------------------------------------

    def fixed_assignment(self) -> Dict[str, int]:
        """Slots pinned up front: columns at 1..|inputs|, result at p."""
        fixed = {e.name: i + 1 for i, e in enumerate(self.column_elements)}
        fixed["l_result"] = self.p
        return fixed

    def output_slot_range(self) -> Tuple[int, int]:
        return self.num_inputs + 1, self.p

    def port_candidates(self, element: IOElement) -> List[str]:
        """Names of same-typed producers a component input may connect to
        (acyclicity is enforced separately, so a component's own output is
        listed here, matching the domain before ordering constraints)."""
        names = [
            e.name for e in self.column_elements if e.type == element.type
        ]
        names += [
            e.name for e in self.output_elements if e.type == element.type
        ]
        return names

    def location_variables(self) -> List[str]:
        names = [e.name for e in self.column_elements]
        names += [e.name for e in self.output_elements]
        names += [e.name for e in self.port_elements]
        names.append("l_result")
        return names

    # -- structural validity (model checking) --------------------------------

    def check_model(self, model: Dict[str, int]) -> List[str]:
        """Violations of the structural constraints; empty means the model
        describes a syntactically correct wiring."""
        violations: List[str] = []
        for name, slot in self.fixed_assignment().items():
            if model.get(name) != slot:
                violations.append(f"fixed slot: {name} must be {slot}, got {model.get(name)}")
        lo, hi = self.output_slot_range()
        out_slots: Dict[int, IOElement] = {}
        for e in self.output_elements:
            slot = model.get(e.name)
            if slot is None or not (lo <= slot <= hi):
                violations.append(f"output range: {e.name}={slot} not in [{lo}, {hi}]")
                continue
            if slot in out_slots:
                violations.append(f"distinct outputs: slot {slot} assigned twice")
            out_slots[slot] = e
        producer_types = {i + 1: c.type for i, c in enumerate(self.columns)}
        for e in self.output_elements:
            slot = model.get(e.name)
            if slot is not None:
                producer_types[slot] = e.type
        for e in self.port_elements:
            slot = model.get(e.name)
            own_output = model.get(self.output_elements[e.component_index].name)
            if slot is None:
                violations.append(f"missing assignment for {e.name}")
                continue
            if producer_types.get(slot) != e.type:
                violations.append(
                    f"typed wiring: {e.name}={slot} feeds {e.type} from "
                    f"{producer_types.get(slot)}"
                )
            if own_output is not None and slot >= own_output:
                violations.append(
                    f"acyclic: {e.name}={slot} not below its output {own_output}"
                )
        if self.components:
            result_producer = out_slots.get(self.p)
            if result_producer is not None and result_producer.type != BOOL:
                violations.append("result slot must hold a bool producer")
        elif self.columns and self.columns[-1].type != BOOL:
            violations.append("result slot must hold a bool producer")
        return violations

    # -- evaluation -----------------------------------------------------------

    def evaluate_model(self, model: Dict[str, int], inputs: Sequence) -> object:
        """Value produced at the result slot for one row of column values."""
        slot_value: Dict[int, object] = {i + 1: v for i, v in enumerate(inputs)}
        by_slot = sorted(
            ((model[e.name], e.component_index) for e in self.output_elements)
        )
        for slot, comp_index in by_slot:
            comp = self.components[comp_index]
            args = []
            for k in range(comp.arity):
                port = f"l_arg_{comp.uid}_{k}"
                args.append(slot_value[model[port]])
            slot_value[slot] = comp.evaluate(args)
        return slot_value[self.p]

    def satisfies_rows(self, model: Dict[str, int]) -> bool:
        return all(
            self.evaluate_model(model, inputs) == expected
            for inputs, expected in self.rows
        )


def encode(matrix: TraceMatrix, level: int) -> SynthesisProblem:
    """Build the synthesis problem for one ladder rung over a matrix.

    Fails fast on a matrix flagged Conflicting: identical inputs with
    different expected outcomes admit no expression at any level.
    """
    if matrix.conflicting:
        raise UnsatisfiableMatrixError(
            f"matrix at location {matrix.location} has conflicting rows"
        )
    if not matrix.columns:
        raise ValueError("matrix must have at least one column")
    components = components_for_level(level, [c.type for c in matrix.columns])
    return encode_with_components(matrix, components)


def encode_with_components(
    matrix: TraceMatrix, components: List[Component]
) -> SynthesisProblem:
    if matrix.conflicting:
        raise UnsatisfiableMatrixError(
            f"matrix at location {matrix.location} has conflicting rows"
        )
    rows = [(row.inputs, row.expected) for row in matrix.rows]
    return SynthesisProblem(
        columns=list(matrix.columns),
        rows=rows,
        components=list(components),
        location=matrix.location,
        kind=matrix.kind,
    )
