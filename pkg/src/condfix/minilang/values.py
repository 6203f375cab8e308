"""Runtime values: booleans, 64-bit wrapping integers, reals, null, records."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

INT_BITS = 64
INT_MIN = -(1 << (INT_BITS - 1))
INT_MAX = (1 << (INT_BITS - 1)) - 1
_INT_MOD = 1 << INT_BITS


class Null:
    """Singleton null reference, only valid where a class type is declared."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "null"


NULL = Null()


@dataclass(frozen=True)
class Obj:
    """Record instance: a class tag plus an opaque payload the registered
    state query methods compute on."""

    cls: str
    payload: Any


Value = Union[bool, int, float, Null, Obj]

PRIMITIVE_TYPES = ("bool", "int", "real")


def wrap_int(x: int) -> int:
    """Two's-complement wrap into the signed 64-bit range."""
    return ((x - INT_MIN) % _INT_MOD) + INT_MIN


def type_of(v: Value) -> str:
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, float):
        return "real"
    if isinstance(v, Null):
        return "null"
    if isinstance(v, Obj):
        return v.cls
    raise TypeError(f"not a MiniLang value: {v!r}")


def matches_declared(v: Value, declared: str) -> bool:
    """A value fits a declared type; null fits any class type."""
    if declared == "bool":
        return isinstance(v, bool)
    if declared == "int":
        return isinstance(v, int) and not isinstance(v, bool)
    if declared == "real":
        return isinstance(v, float)
    return isinstance(v, Null) or (isinstance(v, Obj) and v.cls == declared)


def format_value(v: Value) -> str:
    """Render a value in MiniLang literal syntax (round-trips via the parser)."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format_real(v)
    if isinstance(v, Null):
        return "null"
    if isinstance(v, Obj):
        return f'{v.cls}({v.payload!r})'
    raise TypeError(f"not a MiniLang value: {v!r}")


def format_real(x: float) -> str:
    """Shortest round-trip decimal form, never scientific notation."""
    if x != x or x in (float("inf"), float("-inf")):
        # Special values cannot appear in source or suites; propagate-only.
        return repr(x)
    text = repr(float(x))
    if "e" in text or "E" in text:
        text = format(float(x), "f").rstrip("0")
        if text.endswith("."):
            text += "0"
    if "." not in text:
        text += ".0"
    return text
