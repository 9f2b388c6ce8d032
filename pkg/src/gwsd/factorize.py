"""Relational prime factorization and maximal WSD decomposition.

The fast path runs on an integer code matrix through the compiled kernel when
it is importable (set ``GWSD_PURE=1`` to force the Python twin).  Columns are
ordered by attribute name and codes by value order, so the default pivot is
the least admissible (attribute, value) pair.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Callable, Sequence

from . import _kernels_py
from .errors import CapError
from .relation import Relation, product_all, project
from .tst import split_name
from .values import BOT, Var, natural_key, row_key, value_key
from .wsd import GWSD, to_tuple_level

if os.environ.get("GWSD_PURE"):
    kernel = _kernels_py
else:
    try:
        from . import _kernels as kernel
    except ImportError:  # extension not built
        kernel = _kernels_py

BACKEND = kernel.BACKEND
POWERSET_CAP = 8


@dataclass(frozen=True)
class Factorization:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(sorted(
            self.factors, key=lambda f: [natural_key(a) for a in f.schema])))

    def __len__(self):
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def schemas(self) -> list:
        return [f.schema for f in self.factors]

    def product(self, schema: Sequence[str] | None = None) -> Relation:
        p = product_all(self.factors)
        return p.aligned(schema) if schema is not None else p


def _cell_key(v):
    if isinstance(v, tuple):
        return (0, row_key(v))
    if v is BOT:
        return (1,)
    return (0, value_key(v))


def encode(s: Relation):
    """Column order (sorted attribute names) and the flat code matrix."""
    order = sorted(range(len(s.schema)), key=lambda i: s.schema[i])
    codes_by_col = []
    for i in order:
        vals = sorted({r[i] for r in s.rows}, key=_cell_key)
        codes_by_col.append({v: k for k, v in enumerate(vals)})
    flat = []
    for r in s.rows:
        flat.extend(codes_by_col[j][r[i]] for j, i in enumerate(order))
    return order, flat


def _from_partition(s: Relation, order, parts, packed: bool = False) -> Factorization:
    out = []
    for p in parts:
        cols = sorted(order[c] for c in p)
        if packed:
            out.append(_packed_relation([s.schema[i] for i in cols],
                                        {tuple(r[i] for i in cols) for r in s.rows}))
        else:
            out.append(project(s, [s.schema[i] for i in cols]))
    return Factorization(tuple(out))


def factorize_prime(s: Relation, pivot: Callable | None = None,
                    _packed: bool = False) -> Factorization:
    """Prime factorization.  ``pivot`` receives the admissible (column, code)
    pairs and returns one; the result does not depend on that choice."""
    if len(s) == 0 or len(s.schema) == 1:
        return Factorization((s,))
    order, flat = encode(s)
    parts = kernel.prime_partition(flat, len(s), len(s.schema), pivot)
    return _from_partition(s, order, parts, _packed)


def divides(f: Relation, r: Relation) -> bool:
    """Whether ``f`` is a factor of ``r``: projection plus cardinality test."""
    rest = [a for a in r.schema if a not in f.schema]
    if not rest or len(rest) == len(r.schema) or not set(f.schema) <= set(r.schema):
        from .errors import SchemaError
        raise SchemaError("divisor schema must be a non-empty proper subset")
    if project(r, f.schema) != f.aligned(f.schema):
        return False
    return len(f) * len(project(r, rest)) == len(r)


# -- powerset oracle ---------------------------------------------------------

def powerset_oracle(s: Relation, cap: int = POWERSET_CAP) -> Factorization:
    if len(s.schema) > cap:
        raise CapError(f"arity {len(s.schema)} exceeds powerset cap {cap}")
    if len(s) == 0:
        return Factorization((s,))
    return Factorization(tuple(_split(s)))


def _split(s: Relation) -> list:
    attrs = list(s.schema)
    first, others = attrs[0], attrs[1:]
    for k in range(0, len(others)):
        for extra in itertools.combinations(others, k):
            left = [first, *extra]
            right = [a for a in attrs if a not in left]
            l, r = project(s, left), project(s, right)
            prod = product_all([l, r]).aligned(s.schema)
            if prod == s:
                return [l] + _split(r)
    return [s]


# -- low-memory variant --------------------------------------------------------

class _Lazy:
    """A temporary held as a list of pivot predicates over the input rows."""

    def __init__(self, base, preds):
        self.base = base
        self.preds = preds

    def rows(self):
        return [r for r in self.base if all(r[c] == v for c, v in self.preds)]


def factorize_lowmem(s: Relation) -> Factorization:
    if len(s) == 0 or len(s.schema) == 1:
        return Factorization((s,))
    order, flat = encode(s)
    m = len(s.schema)
    base = [tuple(flat[i * m:(i + 1) * m]) for i in range(len(s))]
    parts = _lowmem(_Lazy(base, ()), list(range(m)))
    return _from_partition(s, order, parts)


def _lowmem(t: _Lazy, cols):
    out, live = [], []
    rows = t.rows()
    for c in cols:
        if len({r[c] for r in rows}) == 1:
            out.append([c])
        else:
            live.append(c)
    if not live:
        return out
    a, v = _kernels_py._default_pivot(rows, live)
    n = len(rows)
    del rows
    q = _Lazy(t.base, t.preds + ((a, v),))
    used = set()
    for f in _lowmem(q, live):
        if a in f:
            continue
        rows = t.rows()
        pf = {tuple(r[c] for c in f) for r in rows}
        if len(pf) != len({tuple(r[c] for c in f) for r in q.rows()}):
            continue
        rest = [c for c in live if c not in f]
        if len(pf) * len({tuple(r[c] for c in rest) for r in rows}) == n:
            out.append(f)
            used.update(f)
    out.append([c for c in live if c not in used])
    return out


# -- WSD decomposition -----------------------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    wsd: GWSD
    level: str
    maximal: bool


def _slots_of(schema, w: GWSD):
    slots = {}
    for i, a in enumerate(schema):
        slots.setdefault(w.layout.slot_of(a), []).append(i)
    return slots


def pack(comp: Relation, w: GWSD):
    """One value per tuple slot; slots containing BOT pack to BOT."""
    slots = _slots_of(comp.schema, w)
    names = [f"{r}.{d}" for r, d in slots]
    rows = []
    for row in comp.rows:
        packed = []
        for idx in slots.values():
            vals = tuple(row[i] for i in idx)
            packed.append(BOT if any(v is BOT for v in vals) else vals)
        rows.append(tuple(packed))
    return _packed_relation(names, set(rows)), slots


def _packed_relation(schema, rowset) -> Relation:
    # cells are whole slot tuples, which the Relation constructor rejects
    rel = Relation.__new__(Relation)
    rel.schema = tuple(schema)
    rel.rows = tuple(sorted(rowset, key=lambda r: tuple(map(_cell_key, r))))
    rel._canon = None
    rel._index = None
    return rel


def unpack(factor: Relation, comp: Relation, slots) -> Relation:
    keys = list(slots)
    names = {f"{r}.{d}": (r, d) for r, d in keys}
    schema, rows = [], []
    for n in factor.schema:
        schema.extend(comp.schema[i] for i in slots[names[n]])
    for prow in factor.rows:
        row = []
        for n, v in zip(factor.schema, prow):
            width = len(slots[names[n]])
            row.extend((BOT,) * width if v is BOT else v)
        rows.append(tuple(row))
    return Relation(schema, rows)


def decompose_wsd_maximal(w: GWSD, level: str = "auto") -> Decomposition:
    """Factor every component.  ``level="attribute"`` factors plain columns,
    ``"tuple"`` packs each tuple slot first, ``"auto"`` picks attribute level
    when no BOT occurs.  Variables are treated as constants; the result is
    then flagged as possibly non-maximal."""
    has_bot = any(v is BOT for c in w.components for r in c.rows for v in r)
    if level == "auto":
        level = "tuple" if has_bot else "attribute"
    if level not in ("tuple", "attribute"):
        raise ValueError(f"unknown level {level!r}")
    maximal = not w.variables()
    comps = []
    if level == "attribute":
        for c in w.components:
            comps.extend(factorize_prime(c).factors)
    else:
        w = to_tuple_level(w)
        for c in w.components:
            packed, slots = pack(c, w)
            for f in factorize_prime(packed, _packed=True).factors:
                comps.append(unpack(f, c, slots))
    return Decomposition(GWSD(comps, w.global_), level, maximal)
