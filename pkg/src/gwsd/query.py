"""Relational algebra queries over worlds and over x-multitables.

Queries are small immutable trees.  A nullary result is modelled as a unary
relation over the attribute :data:`NULLARY_ATTR` holding the constant
``"true"`` when non-empty; ``Project(q, ())`` produces one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from . import relation as rel
from .conditions import TRUE, Atom, conj, eq, flatten_conj
from .errors import FragmentError, SchemaError
from .relation import Ref, Relation
from .tables import CTable, World, XMultitable
from .values import Var, as_value

NULLARY_ATTR = "_"
TRUE_CONST = "true"


class Query:
    def __mul__(self, other):
        return Product(self, other)

    def __add__(self, other):
        return Union(self, other)

    def __sub__(self, other):
        return Difference(self, other)


@dataclass(frozen=True)
class Base(Query):
    name: str


@dataclass(frozen=True)
class Literal(Query):
    schema: tuple
    rows: tuple


def true_literal() -> Literal:
    return Literal((NULLARY_ATTR,), ((TRUE_CONST,),))


@dataclass(frozen=True)
class Select(Query):
    child: Query
    conds: tuple          # (attr, op, rhs) with rhs a Ref or a constant


@dataclass(frozen=True)
class Project(Query):
    child: Query
    attrs: tuple


@dataclass(frozen=True)
class Product(Query):
    left: Query
    right: Query


@dataclass(frozen=True)
class Union(Query):
    left: Query
    right: Query


@dataclass(frozen=True)
class Difference(Query):
    left: Query
    right: Query


@dataclass(frozen=True)
class Rename(Query):
    child: Query
    mapping: tuple        # ((old, new), ...)


def select(child, *conds):
    return Select(child, tuple((a, op, r if isinstance(r, Ref) else as_value(r))
                               for a, op, r in conds))


def project(child, *attrs):
    return Project(child, tuple(attrs))


def rename(child, mapping: Mapping):
    return Rename(child, tuple(mapping.items()))


# -- static checks -----------------------------------------------------------------

def is_positive(q: Query) -> bool:
    if isinstance(q, Difference):
        return False
    if isinstance(q, Select):
        if any(op != "=" for _, op, _ in q.conds):
            return False
        return is_positive(q.child)
    for child in _children(q):
        if not is_positive(child):
            return False
    return True


def _children(q):
    if isinstance(q, (Select, Project, Rename)):
        return (q.child,)
    if isinstance(q, (Product, Union, Difference)):
        return (q.left, q.right)
    return ()


def constants_of(q: Query) -> set:
    out = set()
    if isinstance(q, Literal):
        out |= {v for r in q.rows for v in r if isinstance(v, str)}
    if isinstance(q, Select):
        out |= {r for _, _, r in q.conds if isinstance(r, str)}
    for c in _children(q):
        out |= constants_of(c)
    return out


def is_nullary(schema) -> bool:
    return tuple(schema) == (NULLARY_ATTR,)


def schema_of(q: Query, schemas: Mapping) -> tuple:
    if isinstance(q, Base):
        try:
            return tuple(schemas[q.name])
        except KeyError:
            raise SchemaError(f"unknown relation {q.name!r}") from None
    if isinstance(q, Literal):
        return tuple(q.schema)
    if isinstance(q, Select):
        s = schema_of(q.child, schemas)
        for a, op, r in q.conds:
            if op not in ("=", "!="):
                raise SchemaError(f"unsupported comparison {op!r}")
            if a not in s or (isinstance(r, Ref) and r.name not in s):
                raise SchemaError(f"selection on unknown attribute in {s}")
        return s
    if isinstance(q, Project):
        s = schema_of(q.child, schemas)
        if not q.attrs:
            return (NULLARY_ATTR,)
        for a in q.attrs:
            if a not in s:
                raise SchemaError(f"projection on unknown attribute {a!r}")
        if len(set(q.attrs)) != len(q.attrs):
            raise SchemaError("duplicate attribute in projection")
        return tuple(q.attrs)
    if isinstance(q, Product):
        l, r = schema_of(q.left, schemas), schema_of(q.right, schemas)
        if is_nullary(l):
            return r
        if is_nullary(r):
            return l
        if set(l) & set(r):
            raise SchemaError(f"product needs disjoint schemata: {l} and {r}")
        return l + r
    if isinstance(q, (Union, Difference)):
        l, r = schema_of(q.left, schemas), schema_of(q.right, schemas)
        if set(l) != set(r):
            raise SchemaError(f"schemata differ: {l} and {r}")
        return l
    if isinstance(q, Rename):
        s = schema_of(q.child, schemas)
        m = dict(q.mapping)
        for old in m:
            if old not in s:
                raise SchemaError(f"rename of unknown attribute {old!r}")
        out = tuple(m.get(a, a) for a in s)
        if len(set(out)) != len(out):
            raise SchemaError("rename produces duplicate attributes")
        return out
    raise TypeError(f"not a query: {q!r}")


# -- evaluation on plain worlds -------------------------------------------------------

def eval_on_world(q: Query, w: Mapping) -> Relation:
    if isinstance(q, Base):
        try:
            return w[q.name]
        except KeyError:
            raise SchemaError(f"unknown relation {q.name!r}") from None
    if isinstance(q, Literal):
        return Relation(q.schema, q.rows)
    if isinstance(q, Select):
        return rel.select(eval_on_world(q.child, w), q.conds)
    if isinstance(q, Project):
        child = eval_on_world(q.child, w)
        if not q.attrs:
            return Relation((NULLARY_ATTR,), [(TRUE_CONST,)] if len(child) else [])
        return rel.project(child, q.attrs)
    if isinstance(q, Product):
        l, r = eval_on_world(q.left, w), eval_on_world(q.right, w)
        if is_nullary(l.schema):
            return r if len(l) else Relation(r.schema, [])
        if is_nullary(r.schema):
            return l if len(r) else Relation(l.schema, [])
        return rel.product(l, r)
    if isinstance(q, Union):
        return rel.union(eval_on_world(q.left, w), eval_on_world(q.right, w))
    if isinstance(q, Difference):
        return rel.difference(eval_on_world(q.left, w), eval_on_world(q.right, w))
    if isinstance(q, Rename):
        return rel.rename(eval_on_world(q.child, w), dict(q.mapping))
    raise TypeError(f"not a query: {q!r}")


def answer_world(q: Query, w: World, name: str = "Q") -> World:
    return World({name: eval_on_world(q, w)})


# -- evaluation on x-multitables ------------------------------------------------------

def _choices(cond, mutex):
    atoms = flatten_conj(cond)
    split = mutex.member_formula(atoms) if atoms is not None else None
    return split[0] if split else {}


def _joinable(c1, c2, mutex) -> bool:
    # two different alternatives of one mutex variable never hold together
    a, b = _choices(c1, mutex), _choices(c2, mutex)
    return all(b.get(y, i) == i for y, i in a.items())


def _eval_x(q: Query, t: XMultitable) -> CTable:
    if isinstance(q, Base):
        try:
            return t.tables[q.name]
        except KeyError:
            raise SchemaError(f"unknown relation {q.name!r}") from None
    if isinstance(q, Literal):
        return CTable(q.schema, q.rows)
    if isinstance(q, Select):
        child = _eval_x(q.child, t)
        idx = {a: i for i, a in enumerate(child.schema)}
        rows, conds = [], []
        for row, cond in zip(child.rows, child.conds):
            extra, keep = [], True
            for a, op, r in q.conds:
                if op != "=":
                    raise FragmentError("inequality selections are outside the positive fragment")
                lv = row[idx[a]]
                rv = row[idx[r.name]] if isinstance(r, Ref) else r
                if lv == rv:
                    continue
                if isinstance(lv, str) and isinstance(rv, str):
                    keep = False
                    break
                extra.append(eq(lv, rv))
            if keep:
                rows.append(row)
                conds.append(conj(cond, extra) if extra else cond)
        return CTable(child.schema, rows, conds)
    if isinstance(q, Project):
        child = _eval_x(q.child, t)
        if not q.attrs:
            return CTable((NULLARY_ATTR,), [(TRUE_CONST,)] * len(child.rows), child.conds)
        idx = [child.schema.index(a) for a in q.attrs]
        return CTable(q.attrs, [tuple(r[i] for i in idx) for r in child.rows], child.conds)
    if isinstance(q, Product):
        l, r = _eval_x(q.left, t), _eval_x(q.right, t)
        if is_nullary(l.schema) or is_nullary(r.schema):
            nul, other = (l, r) if is_nullary(l.schema) else (r, l)
            rows, conds = [], []
            for c1 in nul.conds:
                for row, c2 in zip(other.rows, other.conds):
                    if not _joinable(c1, c2, t.mutex):
                        continue
                    rows.append(row)
                    conds.append(conj(c1, c2))
            return CTable(other.schema, rows, conds)
        rows, conds = [], []
        for r1, c1 in zip(l.rows, l.conds):
            for r2, c2 in zip(r.rows, r.conds):
                if not _joinable(c1, c2, t.mutex):
                    continue
                rows.append(r1 + r2)
                conds.append(conj(c1, c2))
        return CTable(l.schema + r.schema, rows, conds)
    if isinstance(q, Union):
        l, r = _eval_x(q.left, t), _eval_x(q.right, t)
        idx = [r.schema.index(a) for a in l.schema]
        rows = list(l.rows) + [tuple(row[i] for i in idx) for row in r.rows]
        return CTable(l.schema, rows, list(l.conds) + list(r.conds))
    if isinstance(q, Difference):
        raise FragmentError("difference is outside the positive fragment")
    if isinstance(q, Rename):
        child = _eval_x(q.child, t)
        m = dict(q.mapping)
        return CTable(tuple(m.get(a, a) for a in child.schema), child.rows, child.conds)
    raise TypeError(f"not a query: {q!r}")


def eval_positive_on_x(q: Query, t: XMultitable, name: str = "Q") -> XMultitable:
    """Answer x-multitable with a single table ``name``."""
    if not is_positive(q):
        raise FragmentError("query is not in the positive fragment")
    schema_of(q, {n: tab.schema for n, tab in t.tables.items()})
    out = _eval_x(q, t)
    return XMultitable({name: out}, t.global_, t.mutex)
