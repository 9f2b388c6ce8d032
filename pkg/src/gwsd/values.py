"""Cell values: constants, variables and the padding symbol.

Constants are plain ``str`` objects, variables are :class:`Var` instances and
the padding symbol is the singleton :data:`BOT`.  The three kinds never compare
equal to each other, so equality of values is purely syntactic.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be non-empty")

    def __repr__(self):
        return f"?{self.name}"


class _Bottom:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "_|_"

    def __reduce__(self):
        return (_Bottom, ())


BOT = _Bottom()

Value = Union[str, Var, _Bottom]

_NUM = re.compile(r"-?\d+\Z")


def const(x) -> str:
    """Coerce ``x`` to a constant (ints become their decimal string)."""
    if isinstance(x, (Var, _Bottom)):
        raise TypeError(f"{x!r} is not a constant")
    return str(x)


def as_value(x) -> Value:
    if isinstance(x, (Var, _Bottom, str)):
        return x
    if isinstance(x, (int, float)):
        return str(x)
    raise TypeError(f"cannot interpret {x!r} as a value")


def is_var(v) -> bool:
    return isinstance(v, Var)


def is_const(v) -> bool:
    return isinstance(v, str)


def is_bot(v) -> bool:
    return v is BOT


def value_key(v):
    # variables < constants < bottom; numeric constants before symbolic ones
    if isinstance(v, Var):
        return (0, 0, 0, v.name)
    if v is BOT:
        return (2, 0, 0, "")
    if _NUM.match(v):
        return (1, 0, int(v), v)
    return (1, 1, 0, v)


def row_key(row):
    return tuple(value_key(v) for v in row)


def natural_key(s: str):
    """Sort key splitting digit runs, so ``d2`` sorts before ``d10``."""
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p)
                 for p in re.split(r"(\d+)", s) if p != "")


def fresh_constants(k: int, avoid=()) -> list[str]:
    """``k`` deterministic constants not occurring in ``avoid``."""
    avoid = set(avoid)
    out, i = [], 1
    while len(out) < k:
        c = f"~{i}"
        if c not in avoid:
            out.append(c)
        i += 1
    return out
