"""Named relations under set semantics and the relational algebra on them.

Cells may hold constants, variables or ``BOT``; the operators treat all three
as opaque atoms.  Relations are immutable and compare under the named
perspective: two relations are equal when they have the same attribute set and
the same tuples once columns are aligned by name.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _cartesian
from typing import Iterable, Sequence

from .errors import AttrError, SchemaError
from .values import as_value, row_key


@dataclass(frozen=True)
class Ref:
    """Attribute reference on the right-hand side of a selection atom."""
    name: str


class Relation:
    __slots__ = ("schema", "rows", "_canon", "_index")

    def __init__(self, schema: Sequence[str], rows: Iterable[Sequence] = ()):
        schema = tuple(schema)
        if not schema:
            raise SchemaError("nullary relations are not allowed")
        if len(set(schema)) != len(schema):
            raise SchemaError(f"duplicate attribute in schema {schema}")
        seen = set()
        for row in rows:
            row = tuple(as_value(v) for v in row)
            if len(row) != len(schema):
                raise SchemaError(
                    f"tuple {row} has {len(row)} values, schema {schema} has {len(schema)}")
            seen.add(row)
        self.schema = schema
        self.rows = tuple(sorted(seen, key=row_key))
        self._canon = None
        self._index = None

    @classmethod
    def _trusted(cls, schema, rowset):
        rel = cls.__new__(cls)
        rel.schema = tuple(schema)
        rel.rows = tuple(sorted(rowset, key=row_key))
        rel._canon = None
        rel._index = None
        return rel

    # -- basic protocol -------------------------------------------------
    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __contains__(self, row):
        return tuple(row) in self.rowset

    @property
    def rowset(self) -> frozenset:
        return self.canonical()[2]

    def index(self, attr: str) -> int:
        if self._index is None:
            self._index = {a: i for i, a in enumerate(self.schema)}
        try:
            return self._index[attr]
        except KeyError:
            raise AttrError(f"unknown attribute {attr!r} (schema {self.schema})") from None

    def canonical(self):
        if self._canon is None:
            order = sorted(range(len(self.schema)), key=lambda i: self.schema[i])
            attrs = tuple(self.schema[i] for i in order)
            if order == list(range(len(order))):
                rows = frozenset(self.rows)
            else:
                rows = frozenset(tuple(r[i] for i in order) for r in self.rows)
            # third slot: row set in own column order, for membership tests
            self._canon = (attrs, rows, frozenset(self.rows))
        return self._canon

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        return self.canonical()[:2] == other.canonical()[:2]

    def __hash__(self):
        return hash(self.canonical()[:2])

    def __repr__(self):
        body = ", ".join("(" + ", ".join(map(repr, r)) + ")" for r in self.rows[:6])
        more = ", ..." if len(self.rows) > 6 else ""
        return f"Relation({list(self.schema)}, {{{body}{more}}})"

    def aligned(self, schema: Sequence[str]) -> "Relation":
        """Same relation with columns reordered to ``schema``."""
        schema = tuple(schema)
        if schema == self.schema:
            return self
        if set(schema) != set(self.schema):
            raise SchemaError(f"cannot align {self.schema} to {schema}")
        idx = [self.index(a) for a in schema]
        return Relation._trusted(schema, {tuple(r[i] for i in idx) for r in self.rows})

    def column(self, attr: str) -> set:
        i = self.index(attr)
        return {r[i] for r in self.rows}

    def values(self) -> set:
        return {v for r in self.rows for v in r}


# -- operators -------------------------------------------------------------

def _operand(rel, what):
    if not isinstance(rel, Relation):
        raise TypeError(f"{what} expects Relation operands, got {type(rel).__name__}")


def select(rel: Relation, conditions) -> Relation:
    """Keep the tuples satisfying every ``(attr, op, rhs)`` atom.

    ``op`` is ``"="`` or ``"!="``; ``rhs`` is a :class:`Ref` to another
    attribute or a value.
    """
    _operand(rel, "select")
    tests = []
    for attr, op, rhs in conditions:
        if op not in ("=", "!="):
            raise SchemaError(f"unsupported comparison {op!r}")
        i = rel.index(attr)
        if isinstance(rhs, Ref):
            tests.append((i, op == "=", True, rel.index(rhs.name)))
        else:
            tests.append((i, op == "=", False, as_value(rhs)))
    keep = set()
    for row in rel.rows:
        for i, eq, is_ref, rhs in tests:
            other = row[rhs] if is_ref else rhs
            if (row[i] == other) != eq:
                break
        else:
            keep.add(row)
    return Relation._trusted(rel.schema, keep)


def project(rel: Relation, attrs: Sequence[str]) -> Relation:
    _operand(rel, "project")
    attrs = tuple(attrs)
    if not attrs:
        raise SchemaError("projection onto the empty attribute set would be nullary")
    if len(set(attrs)) != len(attrs):
        raise SchemaError(f"duplicate attribute in projection list {attrs}")
    idx = [rel.index(a) for a in attrs]
    return Relation._trusted(attrs, {tuple(r[i] for i in idx) for r in rel.rows})


def product(left: Relation, right: Relation) -> Relation:
    _operand(left, "product")
    _operand(right, "product")
    clash = set(left.schema) & set(right.schema)
    if clash:
        raise SchemaError(f"product needs disjoint schemata, shared: {sorted(clash)}")
    rows = {a + b for a, b in _cartesian(left.rows, right.rows)}
    return Relation._trusted(left.schema + right.schema, rows)


def product_all(relations: Sequence[Relation]) -> Relation:
    relations = list(relations)
    if not relations:
        raise SchemaError("product of no relations is nullary")
    out = relations[0]
    for rel in relations[1:]:
        out = product(out, rel)
    return out


def _same_schema(a: Relation, b: Relation, what: str) -> Relation:
    _operand(a, what)
    _operand(b, what)
    if set(a.schema) != set(b.schema):
        raise SchemaError(f"{what} needs identical schemata: {a.schema} vs {b.schema}")
    return b.aligned(a.schema)


def union(a: Relation, b: Relation) -> Relation:
    b = _same_schema(a, b, "union")
    return Relation._trusted(a.schema, set(a.rows) | set(b.rows))


def difference(a: Relation, b: Relation) -> Relation:
    b = _same_schema(a, b, "difference")
    return Relation._trusted(a.schema, set(a.rows) - set(b.rows))


def intersection(a: Relation, b: Relation) -> Relation:
    b = _same_schema(a, b, "intersection")
    return Relation._trusted(a.schema, set(a.rows) & set(b.rows))


def rename(rel: Relation, mapping: dict) -> Relation:
    _operand(rel, "rename")
    for old in mapping:
        rel.index(old)
    schema = tuple(mapping.get(a, a) for a in rel.schema)
    if len(set(schema)) != len(schema):
        raise SchemaError(f"renaming {mapping} produces duplicate attributes")
    return Relation._trusted(schema, rel.rows)


def divide(r: Relation, f: Relation) -> Relation:
    """Largest ``Q`` over ``sch(r) - sch(f)`` with ``Q x f`` contained in ``r``."""
    _operand(r, "divide")
    _operand(f, "divide")
    fs = set(f.schema)
    if not fs < set(r.schema):
        raise SchemaError(f"divisor schema {f.schema} must be a proper subset of {r.schema}")
    if not f.rows:
        raise SchemaError("division by the empty relation")
    rest = tuple(a for a in r.schema if a not in fs)
    ri = [r.index(a) for a in rest]
    fi = [r.index(a) for a in f.schema]
    groups: dict = {}
    for row in r.rows:
        groups.setdefault(tuple(row[i] for i in ri), set()).add(tuple(row[i] for i in fi))
    need = set(f.rows)
    return Relation._trusted(rest, {k for k, got in groups.items() if need <= got})


def divides_exactly(r: Relation, f: Relation) -> bool:
    """``(r / f) x f == r``."""
    if not set(f.schema) < set(r.schema) or not f.rows:
        return False
    return product(divide(r, f), f) == r


_OPS = {
    "select": select,
    "project": project,
    "product": product,
    "union": union,
    "difference": difference,
    "rename": rename,
    "divide": divide,
}


def ra_apply(op: str, *args) -> Relation:
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown relational operator {op!r}") from None
    return fn(*args)
