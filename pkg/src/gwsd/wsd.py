"""World-set decompositions.

A :class:`GWSD` is a list of component relations over disjoint parts of a
wide schema plus a global conjunction of inequalities.  Its worlds are those
of the gTST obtained as the product of the components.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .conditions import Atom, satisfiable_conjunction
from .errors import BudgetError, SchemaError
from .relation import Relation, product_all
from .tables import EMPTY_MARKER, EnumBudget, World
from .tst import GTST, Layout, canonical_bot, inline_inverse_world, split_name
from .values import BOT, Var, natural_key, value_key


def _component_key(c: Relation):
    return natural_key(c.schema[0]) if c.schema else ()


def _canon_component(comp: Relation, layout: Layout) -> Relation:
    # slots lying entirely inside this component get all-BOT padding
    inside = {}
    cols = {a: i for i, a in enumerate(comp.schema)}
    for a in comp.schema:
        r, d, _ = layout.where[a]
        inside.setdefault((r, d), []).append(cols[a])
    full = [idx for (r, d), idx in inside.items() if len(idx) == len(layout.attrs[r])]
    if not any(v is BOT for row in comp.rows for v in row):
        return comp
    rows = set()
    for row in comp.rows:
        row = list(row)
        for idx in full:
            if any(row[i] is BOT for i in idx):
                for i in idx:
                    row[i] = BOT
        rows.add(tuple(row))
    return Relation._trusted(comp.schema, rows)


class GWSD:
    """Components plus a global conjunction of ``!=`` atoms.

    Components are kept sorted by their first attribute.  Mixed-BOT slots
    that lie within a single component are canonicalized to all-BOT.
    """

    __slots__ = ("components", "global_", "layout")

    def __init__(self, components: Iterable[Relation], global_: Iterable[Atom] = ()):
        comps = list(components)
        for c in comps:
            if not isinstance(c, Relation):
                raise TypeError("components must be Relation instances")
        g = frozenset(global_)
        for a in g:
            if a.op != "!=":
                raise SchemaError(f"global condition atom {a!r} is not an inequality")
        schema = [a for c in comps for a in c.schema]
        if len(set(schema)) != len(schema):
            raise SchemaError("component schemata overlap")
        if not comps:
            raise SchemaError("a decomposition needs at least one component")
        self.layout = Layout.from_schema(schema)
        comps.sort(key=_component_key)
        self.components = tuple(_canon_component(c, self.layout) for c in comps)
        self.global_ = g

    # structural protocol ---------------------------------------------------
    def _key(self):
        return (frozenset(self.components), self.global_)

    def __eq__(self, other):
        return isinstance(other, GWSD) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        parts = [f"{list(c.schema)}:{len(c)}" for c in self.components]
        return f"GWSD({', '.join(parts)}; global={sorted(map(repr, self.global_))})"

    @property
    def schema(self):
        return tuple(a for c in self.components for a in c.schema)

    def sizes(self):
        return [len(c) for c in self.components]

    def variables(self):
        out = {v for c in self.components for r in c.rows for v in r if isinstance(v, Var)}
        for a in self.global_:
            out |= {t for t in a.terms() if isinstance(t, Var)}
        return out

    def data_variables(self):
        return {v for c in self.components for r in c.rows for v in r if isinstance(v, Var)}

    def constants(self):
        out = {v for c in self.components for r in c.rows for v in r if isinstance(v, str)}
        for a in self.global_:
            out |= {t for t in a.terms() if isinstance(t, str)}
        return out

    def is_empty(self) -> bool:
        return any(len(c) == 0 for c in self.components) or \
            not satisfiable_conjunction(self.global_)

    def is_tuple_level(self) -> bool:
        owner = {}
        for k, c in enumerate(self.components):
            for a in c.schema:
                s = self.layout.slot_of(a)
                if owner.setdefault(s, k) != k:
                    return False
        return True

    def slot_owner(self) -> dict:
        return {self.layout.slot_of(a): k for k, c in enumerate(self.components)
                for a in c.schema}


def make_gwsd(components, global_=()) -> GWSD:
    return GWSD(components, global_)


@dataclass
class LevelReport:
    valid: bool
    level: str | None = None          # "tuple" or "attribute"
    kind: str | None = None           # "WSD", "vWSD" or "gWSD"
    problems: list = field(default_factory=list)


def validate(components, global_=()) -> LevelReport:
    """Check a candidate decomposition without raising."""
    if isinstance(components, GWSD):
        global_ = components.global_
        components = components.components
    comps = list(components)
    problems = []
    if not comps:
        problems.append("no components")
    seen = set()
    for c in comps:
        if not c.schema:
            problems.append("nullary component")
        for a in c.schema:
            if a in seen:
                problems.append(f"attribute {a} occurs in two components")
            seen.add(a)
    try:
        layout = Layout.from_schema([a for c in comps for a in c.schema])
    except SchemaError as e:
        problems.append(str(e))
        layout = None
    if any(a.op != "!=" for a in global_):
        problems.append("global condition contains equalities")
    if problems:
        return LevelReport(False, problems=problems)
    owner, level = {}, "tuple"
    for k, c in enumerate(comps):
        for a in c.schema:
            if owner.setdefault(layout.slot_of(a), k) != k:
                level = "attribute"
    has_vars = any(isinstance(v, Var) for c in comps for r in c.rows for v in r) or \
        any(isinstance(t, Var) for a in global_ for t in a.terms())
    if global_:
        kind = "gWSD"
    elif has_vars:
        kind = "vWSD"
    else:
        kind = "WSD"
    return LevelReport(True, level, kind, [])


def compose(w: GWSD) -> GTST:
    """Product of the components as a gTST with the shared global condition."""
    prod = product_all(w.components).aligned(w.layout.schema) if all(
        len(c) for c in w.components) else None
    rows = prod.rows if prod is not None else ()
    return GTST(w.layout, rows, [w.global_] * len(rows))


def as_one_component(w: GWSD) -> GWSD:
    g = compose(w)
    return GWSD([Relation(g.schema, g.rows)], w.global_)


def to_tuple_level(w: GWSD) -> GWSD:
    """Merge components that share a tuple slot (by taking their product)."""
    if w.is_tuple_level():
        return w
    n = len(w.components)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    first = {}
    for k, c in enumerate(w.components):
        for a in c.schema:
            s = w.layout.slot_of(a)
            if s in first:
                parent[find(k)] = find(first[s])
            else:
                first[s] = k
    groups = {}
    for k in range(n):
        groups.setdefault(find(k), []).append(w.components[k])
    merged = [product_all(g) if len(g) > 1 else g[0] for g in groups.values()]
    return GWSD(merged, w.global_)


def budget_pool(w: GWSD, budget: EnumBudget):
    data = w.data_variables()
    if budget.fresh is not None and budget.fresh < len(data):
        raise BudgetError(
            f"pool has {budget.fresh} fresh constants, {len(data)} data variables need values")
    return budget.pool(w.constants(), len(data))


def _split_global(global_, chosen_vars):
    inner, outer = [], []
    for a in global_:
        vs = {t for t in a.terms() if isinstance(t, Var)}
        (inner if vs <= chosen_vars else outer).append(a)
    return inner, outer


def iter_combinations(w: GWSD):
    """Each choice of one row per component, concatenated in schema order."""
    for choice in itertools.product(*(c.rows for c in w.components)):
        yield choice, tuple(v for row in choice for v in row)


def rep_enumerate_wsd(w: GWSD, budget: EnumBudget | None = None) -> set:
    budget = budget or EnumBudget()
    pool = budget_pool(w, budget)
    schema = w.schema
    out = set()
    if any(len(c) == 0 for c in w.components):
        return out
    for _, row in iter_combinations(w):
        vs = sorted({v for v in row if isinstance(v, Var)})
        inner, outer = _split_global(w.global_, set(vs))
        if any(a.left == a.right for a in outer):
            continue
        total = len(pool) ** len(vs)
        if total > budget.max_valuations:
            raise BudgetError(f"enumeration needs more than {budget.max_valuations} valuations")
        for combo in itertools.product(pool, repeat=len(vs)):
            val = dict(zip(vs, combo))
            ok = True
            for a in inner:
                l = val.get(a.left, a.left)
                r = val.get(a.right, a.right)
                if l == r:
                    ok = False
                    break
            if not ok:
                continue
            grounded = tuple(val.get(v, v) if isinstance(v, Var) else v for v in row)
            out.add(inline_inverse_world(grounded, w.layout, schema))
    return out


def worlds_to_1wsd(worlds: Sequence[World], relations: Mapping | None = None) -> GWSD:
    """Encode a finite world-set as a 1-WSD, tuples inlined in sorted order."""
    worlds = list(worlds)
    if relations is None:
        relations = {}
        for wd in worlds:
            for n in wd:
                relations.setdefault(n, wd[n].schema)
    maxima = {n: max((len(wd[n]) for wd in worlds if n in wd), default=0) for n in relations}
    for n in relations:
        if maxima[n] == 0:
            maxima[n] = 1
    layout = Layout.build(relations, maxima)
    rows = []
    for wd in worlds:
        row = []
        for n, attrs in layout.attrs.items():
            rel = wd[n].aligned(attrs) if n in wd else None
            tuples = list(rel.rows) if rel is not None else []
            for i in range(maxima[n]):
                row.extend(tuples[i] if i < len(tuples) else (BOT,) * len(attrs))
        rows.append(tuple(row))
    return GWSD([Relation(layout.schema, rows)])


def prop5_family(n: int) -> GWSD:
    """``n`` components ``{a_i, b_i}`` over ``R.d_i.A``."""
    return GWSD([Relation([f"R.d{i}.A"], [(f"a{i}",), (f"b{i}",)]) for i in range(1, n + 1)])
