"""Building blocks for expression synthesis.

Each component is one operator instance with fixed input/output types.
Comparisons map int or real pairs to bool, arithmetic maps numeric pairs
to the same numeric type, and the logical operators work on bools.
Greater-than forms are not separate components; they are reachable by
swapping operands of ``<`` and ``<=``. Division is excluded.

The difficulty ladder has four rungs: comparisons only, plus logical
operators, plus arithmetic, and finally two instances of everything.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

BOOL, INT, REAL = "bool", "int", "real"

COMPARISON_TAGS = ("<", "<=", "==", "!=")
LOGICAL_TAGS = ("&&", "||", "!")
ARITHMETIC_TAGS = ("+", "-", "*")

MIN_LEVEL, MAX_LEVEL = 1, 4


@dataclass(frozen=True)
class Component:
    tag: str
    in_types: Tuple[str, ...]
    out_type: str
    instance: int = 0
    label: Optional[str] = None  # call-style display name override

    @property
    def arity(self) -> int:
        return len(self.in_types)

    @property
    def uid(self) -> str:
        """Unique variable-name stem, e.g. ``le_int_0``."""
        tag_names = {
            "<": "lt", "<=": "le", "==": "eq", "!=": "ne",
            "&&": "and", "||": "or", "!": "not",
            "+": "add", "-": "sub", "*": "mul",
        }
        stem = self.label or tag_names.get(self.tag, self.tag)
        return f"{stem}_{'_'.join(self.in_types)}_{self.instance}"

    def evaluate(self, args: Sequence):
        a = args[0]
        if self.tag == "!":
            return not a
        b = args[1]
        if self.tag == "<":
            return a < b
        if self.tag == "<=":
            return a <= b
        if self.tag == "==":
            return a == b
        if self.tag == "!=":
            return a != b
        if self.tag == "&&":
            return a and b
        if self.tag == "||":
            return a or b
        if self.tag == "+":
            return a + b
        if self.tag == "-":
            return a - b
        if self.tag == "*":
            return a * b
        raise ValueError(f"unknown component tag {self.tag!r}")


def _comparison_set(numeric_types: Iterable[str], instance: int) -> List[Component]:
    comps = []
    for t in numeric_types:
        for tag in COMPARISON_TAGS:
            comps.append(Component(tag, (t, t), BOOL, instance))
    return comps


def _logical_set(instance: int) -> List[Component]:
    return [
        Component("&&", (BOOL, BOOL), BOOL, instance),
        Component("||", (BOOL, BOOL), BOOL, instance),
        Component("!", (BOOL,), BOOL, instance),
    ]


def _arithmetic_set(numeric_types: Iterable[str], instance: int) -> List[Component]:
    comps = []
    for t in numeric_types:
        for tag in ARITHMETIC_TAGS:
            comps.append(Component(tag, (t, t), t, instance))
    return comps


def components_for_level(level: int, column_types: Iterable[str]) -> List[Component]:
    """Component multiset for a ladder rung, instantiated only over numeric
    types that actually occur among the matrix columns (a comparison over
    reals is useless, and unwireable, without a real column)."""
    if not MIN_LEVEL <= level <= MAX_LEVEL:
        raise ValueError(f"level must be in [{MIN_LEVEL}, {MAX_LEVEL}], got {level}")
    present = set(column_types)
    numeric = [t for t in (INT, REAL) if t in present]

    instances = (0, 1) if level >= 4 else (0,)
    comps: List[Component] = []
    for instance in instances:
        comps.extend(_comparison_set(numeric, instance))
        if level >= 2:
            comps.extend(_logical_set(instance))
        if level >= 3:
            comps.extend(_arithmetic_set(numeric, instance))
    return comps
