"""Tabsets, the inline encoding and g-tabset tables (gTSTs).

A *wide* attribute name has the form ``Rel.dK.Attr``: relation, tuple id and
attribute.  Two-part names ``dK.Attr`` are accepted too and belong to the
relation :data:`DEFAULT_RELATION`.  :class:`Layout` recovers the relation
schemata and slot structure from a list of wide names.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .conditions import satisfiable_conjunction, substitute
from .errors import CapacityError, SchemaError
from .tables import EMPTY_MARKER, GMultitable, Table, World, normalize_g, rep_enumerate
from .relation import Relation
from .values import BOT, Var, natural_key

DEFAULT_RELATION = "R"


def split_name(name: str):
    parts = name.split(".")
    if len(parts) == 3 and all(parts):
        return tuple(parts)
    if len(parts) == 2 and all(parts):
        return (DEFAULT_RELATION, parts[0], parts[1])
    raise SchemaError(f"{name!r} is not a wide attribute name (Rel.tid.Attr)")


def wide_name(rel: str, tid: str, attr: str) -> str:
    return f"{rel}.{tid}.{attr}"


class Layout:
    """Relation schemata and tuple slots of a wide schema.

    ``attrs[R]`` lists the attributes of ``R`` in order of first appearance,
    ``slots[R]`` the tuple ids in natural order, and ``name[(R, d, A)]`` the
    wide attribute name actually used.
    """

    def __init__(self, relations: Mapping, slots: Mapping, names: Mapping | None = None):
        self.attrs = {r: tuple(a) for r, a in relations.items()}
        self.slots = {r: tuple(s) for r, s in slots.items()}
        self.name = dict(names) if names else {}
        for r, ids in self.slots.items():
            for d in ids:
                for a in self.attrs[r]:
                    self.name.setdefault((r, d, a), wide_name(r, d, a))
        self.schema = tuple(self.name[(r, d, a)] for r in self.attrs
                            for d in self.slots[r] for a in self.attrs[r])
        self.where = {n: k for k, n in self.name.items()}

    @classmethod
    def from_schema(cls, schema: Sequence[str]) -> "Layout":
        rels, slots, names = {}, {}, {}
        for n in schema:
            r, d, a = split_name(n)
            if (r, d, a) in names:
                raise SchemaError(f"wide attribute {n!r} repeats slot {(r, d, a)}")
            rels.setdefault(r, [])
            if a not in rels[r]:
                rels[r].append(a)
            slots.setdefault(r, [])
            if d not in slots[r]:
                slots[r].append(d)
            names[(r, d, a)] = n
        for r in rels:
            slots[r].sort(key=natural_key)
            for d in slots[r]:
                for a in rels[r]:
                    if (r, d, a) not in names:
                        raise SchemaError(f"slot {r}.{d} lacks attribute {a!r}")
        return cls(rels, slots, names)

    @classmethod
    def build(cls, relations: Mapping, maxima: Mapping) -> "Layout":
        return cls(relations, {r: [f"d{i}" for i in range(1, maxima.get(r, 0) + 1)]
                               for r in relations})

    def slot_columns(self, rel: str, tid: str):
        return [self.name[(rel, tid, a)] for a in self.attrs[rel]]

    def slot_of(self, attr: str):
        r, d, _ = self.where[attr]
        return (r, d)

    def all_slots(self):
        return [(r, d) for r in self.attrs for d in self.slots[r]]

    def positions(self, schema: Sequence[str]):
        """Per slot, the column indices of its attributes within ``schema``."""
        idx = {a: i for i, a in enumerate(schema)}
        return {(r, d): [idx[self.name[(r, d, a)]] for a in self.attrs[r]]
                for r, d in self.all_slots()}

    def __eq__(self, other):
        return isinstance(other, Layout) and self.schema == other.schema and \
            self.attrs == other.attrs

    def __repr__(self):
        return f"Layout({list(self.schema)})"


def inline(m: GMultitable, maxima: Mapping, layout: Layout | None = None) -> tuple:
    """Concatenate the tuples of ``m`` slot by slot, padding with all-BOT tuples."""
    if layout is None:
        layout = Layout.build({n: t.schema for n, t in m.tables.items()}, maxima)
    out = []
    for r in layout.attrs:
        tab = m.tables.get(r)
        rows = list(tab.rows) if tab is not None else []
        cap = len(layout.slots[r])
        if len(rows) > cap:
            raise CapacityError(f"relation {r!r} has {len(rows)} tuples, capacity {cap}")
        if tab is not None and tuple(tab.schema) != layout.attrs[r]:
            aligned = [tab.schema.index(a) for a in layout.attrs[r]]
            rows = [tuple(row[i] for i in aligned) for row in rows]
        width = len(layout.attrs[r])
        for i in range(cap):
            out.extend(rows[i] if i < len(rows) else (BOT,) * width)
    return tuple(out)


def inline_inverse(row: Sequence, layout: Layout, schema: Sequence[str] | None = None) -> dict:
    """Tables of the multitable encoded by a wide tuple; t_bot slots are dropped."""
    schema = layout.schema if schema is None else tuple(schema)
    pos = layout.positions(schema)
    out = {}
    for r in layout.attrs:
        rows = []
        for d in layout.slots[r]:
            vals = tuple(row[i] for i in pos[(r, d)])
            if any(v is BOT for v in vals):
                continue
            rows.append(vals)
        out[r] = Table(layout.attrs[r], rows)
    return out


def inline_inverse_world(row, layout: Layout, schema=None) -> World:
    tabs = inline_inverse(row, layout, schema)
    return World({r: Relation(t.schema, t.rows) for r, t in tabs.items()})


def canonical_bot(row: Sequence, layout: Layout, schema=None) -> tuple:
    """Turn every slot containing BOT into an all-BOT slot."""
    schema = layout.schema if schema is None else tuple(schema)
    row = list(row)
    for cols in layout.positions(schema).values():
        if any(row[i] is BOT for i in cols):
            for i in cols:
                row[i] = BOT
    return tuple(row)


@dataclass(frozen=True)
class Tabset:
    members: tuple

    def __post_init__(self):
        members = tuple(self.members)
        schemas = {tuple((n, t.schema) for n, t in sorted(m.tables.items())) for m in members}
        if len(schemas) > 1:
            raise SchemaError("tabset members must share one relational schema")
        object.__setattr__(self, "members", members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def maxima(self) -> dict:
        out = {}
        for m in self.members:
            for n, t in m.tables.items():
                out[n] = max(out.get(n, 0), len(t.rows))
        return out

    def relations(self) -> dict:
        for m in self.members:
            return {n: t.schema for n, t in m.tables.items()}
        return {}


def rep_tabset(ts: Tabset, budget=None) -> set:
    out = set()
    for m in ts:
        out |= rep_enumerate(m, budget)
    return out


@dataclass(frozen=True)
class GTST:
    """Wide table with one conjunction per row (``conds``)."""
    layout: Layout
    rows: tuple
    conds: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        conds = tuple(frozenset(c) for c in self.conds)
        if len(rows) != len(conds):
            raise SchemaError("every gTST row needs a condition")
        width = len(self.layout.schema)
        for r in rows:
            if len(r) != width:
                raise SchemaError(f"gTST row {r} does not match width {width}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "conds", conds)

    @property
    def schema(self):
        return self.layout.schema

    def common_phi(self):
        """The shared condition, or ``None`` when rows carry different ones."""
        cs = set(self.conds)
        if len(cs) == 1:
            return next(iter(cs))
        return frozenset() if not cs else None

    def member(self, i: int) -> GMultitable:
        return GMultitable(inline_inverse(self.rows[i], self.layout), self.conds[i])


def tabset_to_gtst(ts: Tabset, maxima: Mapping | None = None) -> GTST:
    maxima = dict(ts.maxima()) if maxima is None else dict(maxima)
    layout = Layout.build(ts.relations(), maxima)
    rows = [inline(m, maxima, layout) for m in ts]
    return GTST(layout, rows, [m.global_ for m in ts])


def gtst_to_tabset(g: GTST) -> Tabset:
    return Tabset(tuple(g.member(i) for i in range(len(g.rows))))


def rep_gtst(g: GTST, budget=None) -> set:
    out = set()
    for i in range(len(g.rows)):
        out |= rep_enumerate(g.member(i), budget)
    return out


def _variables_of(row, cond):
    out = {v for v in row if isinstance(v, Var)}
    for a in cond:
        out |= {t for t in a.terms() if isinstance(t, Var)}
    return out


def rename_apart(rows, conds):
    """Rename variables shared between rows to ``name_i`` (row index ``i``)."""
    vsets = [_variables_of(r, c) for r, c in zip(rows, conds)]
    seen = {}
    for i, vs in enumerate(vsets):
        for v in vs:
            seen.setdefault(v, set()).add(i)
    taken = {v.name for vs in vsets for v in vs}
    out_rows, out_conds = [], []
    for i, (row, cond) in enumerate(zip(rows, conds)):
        mapping = {}
        for v in sorted(vsets[i]):
            if len(seen[v]) > 1:
                base, k = f"{v.name}_{i + 1}", 0
                name = base
                while name in taken:
                    k += 1
                    name = f"{base}_{k}"
                taken.add(name)
                mapping[v] = Var(name)
        out_rows.append(tuple(mapping.get(v, v) for v in row))
        out_conds.append(frozenset(substitute(cond, mapping)) if mapping else cond)
    return out_rows, out_conds


def normalize_global(g: GTST) -> GTST:
    """One global condition shared by every row.

    Each row's condition is brought into the inequality normal form, rows with
    unsatisfiable conditions are dropped, variables are renamed apart and the
    remaining conditions are conjoined.
    """
    rows, conds = [], []
    for row, cond in zip(g.rows, g.conds):
        norm_row, norm_cond = _normalize_row(row, cond)
        if norm_cond is None:
            continue
        rows.append(norm_row)
        conds.append(norm_cond)
    rows, conds = rename_apart(rows, conds)
    phi = frozenset().union(*conds) if conds else frozenset()
    return GTST(g.layout, rows, [phi] * len(rows))


def _normalize_row(row, cond):
    """Substitute away equalities of ``cond`` in ``row``; ``None`` if unsatisfiable."""
    if not satisfiable_conjunction(cond):
        return row, None
    schema = tuple(f"c{i}" for i in range(len(row)))
    # BOT cells are not allowed inside multitables, so mask them temporarily
    masked = tuple(Var("\0bot") if v is BOT else v for v in row)
    g = normalize_g(GMultitable({"w": Table(schema, [masked])}, cond))
    if g.global_ == EMPTY_MARKER:
        return row, None
    new = g.tables["w"].rows[0]
    return tuple(BOT if v == Var("\0bot") else v for v in new), g.global_
