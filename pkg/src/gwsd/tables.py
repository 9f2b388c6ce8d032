"""Conditional tables and their possible-worlds semantics.

Three containers are provided.  :class:`CMultitable` carries a global
condition and one local condition per tuple; :class:`GMultitable` has no local
conditions and a conjunctive global condition; :class:`XMultitable` is a
c-multitable whose locals are built from a :class:`~gwsd.conditions.MutexSet`.

:func:`rep_enumerate` is the reference semantics used throughout the tests.
It values variables over a finite pool (active domain, extra constants and a
number of fresh constants), which is exhaustive for (in)equality conditions as
long as every variable can be given its own fresh value.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .conditions import (TRUE, And, Atom, MutexSet, Not, Or, _Classes, as_condition,
                         eval_condition, flatten_conj, ne)
from .conditions import constants as cond_constants
from .conditions import variables as cond_variables
from .errors import BudgetError, SchemaError
from .relation import Relation
from .values import BOT, Var, fresh_constants, value_key

EMPTY_MARKER = frozenset([ne(Var("_"), Var("_"))])


def _dedupe(rows):
    seen, out = set(), []
    for r in rows:
        if r not in seen:
            seen.add(r)
            out.append(r)
    return tuple(out)


def _check_schema(schema):
    schema = tuple(schema)
    if not schema:
        raise SchemaError("nullary relations are not allowed")
    if len(set(schema)) != len(schema):
        raise SchemaError(f"duplicate attribute in schema {schema}")
    return schema


def _norm_row(row, width, allow_bot=False):
    out = []
    for v in row:
        if isinstance(v, int):
            v = str(v)
        if v is BOT and not allow_bot:
            raise SchemaError("the padding symbol cannot occur in a multitable")
        if not (isinstance(v, (str, Var)) or v is BOT):
            raise TypeError(f"bad cell value {v!r}")
        out.append(v)
    if len(out) != width:
        raise SchemaError(f"tuple {tuple(out)} does not match arity {width}")
    return tuple(out)


@dataclass(frozen=True)
class Table:
    """A relation over constants and variables, in a fixed tuple order."""
    schema: tuple
    rows: tuple = ()

    def __post_init__(self):
        schema = _check_schema(self.schema)
        object.__setattr__(self, "schema", schema)
        rows = _dedupe(_norm_row(r, len(schema)) for r in self.rows)
        object.__setattr__(self, "rows", rows)

    def variables(self):
        return {v for r in self.rows for v in r if isinstance(v, Var)}

    def constants(self):
        return {v for r in self.rows for v in r if isinstance(v, str)}


@dataclass(frozen=True)
class CTable:
    """Tuples with local conditions.  The same tuple may occur several times
    with different conditions; it is present in a world if any of them holds."""
    schema: tuple
    rows: tuple = ()
    conds: tuple = None

    def __post_init__(self):
        schema = _check_schema(self.schema)
        object.__setattr__(self, "schema", schema)
        rows = tuple(_norm_row(r, len(schema)) for r in self.rows)
        conds = self.conds if self.conds is not None else (TRUE,) * len(rows)
        conds = tuple(as_condition(c) for c in conds)
        if len(conds) != len(rows):
            raise SchemaError("every tuple needs exactly one local condition")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "conds", conds)

    def variables(self):
        out = {v for r in self.rows for v in r if isinstance(v, Var)}
        for c in self.conds:
            out |= cond_variables(c)
        return out

    def constants(self):
        out = {v for r in self.rows for v in r if isinstance(v, str)}
        for c in self.conds:
            out |= cond_constants(c)
        return out


@dataclass(frozen=True)
class CMultitable:
    tables: Mapping
    global_: object = TRUE

    def __post_init__(self):
        tabs = {}
        for name, t in dict(self.tables).items():
            if isinstance(t, Table):
                t = CTable(t.schema, t.rows)
            tabs[name] = t
        object.__setattr__(self, "tables", tabs)
        object.__setattr__(self, "global_", as_condition(self.global_))

    def __hash__(self):
        return hash((tuple(sorted(self.tables)), self.global_))

    def variables(self):
        out = set(cond_variables(self.global_))
        for t in self.tables.values():
            out |= t.variables()
        return out

    def data_variables(self):
        return {v for t in self.tables.values() for r in t.rows for v in r
                if isinstance(v, Var)}

    def constants(self):
        out = set(cond_constants(self.global_))
        for t in self.tables.values():
            out |= t.constants()
        return out


@dataclass(frozen=True)
class XMultitable(CMultitable):
    mutex: MutexSet = field(default_factory=MutexSet)

    def __hash__(self):
        return hash((tuple(sorted(self.tables)), self.global_, self.mutex))


@dataclass(frozen=True)
class GMultitable:
    tables: Mapping
    global_: frozenset = frozenset()

    def __post_init__(self):
        tabs = {}
        for name, t in dict(self.tables).items():
            if not isinstance(t, Table):
                schema, rows = t
                t = Table(schema, rows)
            tabs[name] = t
        g = self.global_
        if not isinstance(g, frozenset):
            atoms = flatten_conj(g)
            if atoms is None:
                raise SchemaError("g-multitable global condition must be a conjunction")
            g = atoms
        object.__setattr__(self, "tables", tabs)
        object.__setattr__(self, "global_", g)

    def __hash__(self):
        return hash((tuple((n, t) for n, t in sorted(self.tables.items())), self.global_))

    def variables(self):
        out = set()
        for a in self.global_:
            out |= cond_variables(a)
        for t in self.tables.values():
            out |= t.variables()
        return out

    def data_variables(self):
        out = set()
        for t in self.tables.values():
            out |= t.variables()
        return out

    def constants(self):
        out = set()
        for a in self.global_:
            out |= cond_constants(a)
        for t in self.tables.values():
            out |= t.constants()
        return out

    def to_c(self) -> CMultitable:
        return CMultitable({n: CTable(t.schema, t.rows) for n, t in self.tables.items()},
                           self.global_)


def vmultitable(tables) -> GMultitable:
    """A v-multitable: a g-multitable whose global condition is true."""
    return GMultitable(tables, frozenset())


# -- worlds -------------------------------------------------------------------

class World(Mapping):
    """A database instance: relation name to constant-only :class:`Relation`."""

    __slots__ = ("_rels", "_key")

    def __init__(self, rels: Mapping):
        rels = dict(rels)
        for name, rel in rels.items():
            if not isinstance(rel, Relation):
                raise TypeError(f"world relation {name!r} must be a Relation")
            for row in rel.rows:
                for v in row:
                    if not isinstance(v, str):
                        raise SchemaError(f"world relation {name!r} holds non-constant {v!r}")
        self._rels = rels
        self._key = None

    def __getitem__(self, name):
        return self._rels[name]

    def __iter__(self):
        return iter(sorted(self._rels))

    def __len__(self):
        return len(self._rels)

    def key(self):
        if self._key is None:
            self._key = frozenset(self._rels.items())
        return self._key

    def __eq__(self, other):
        if not isinstance(other, World):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        parts = []
        for name in self:
            rows = ", ".join("(" + ",".join(r) + ")" for r in self._rels[name].rows)
            parts.append(f"{name}={{{rows}}}")
        return "World(" + "; ".join(parts) + ")"

    def sort_key(self):
        return tuple((n, len(self._rels[n]), tuple(tuple(value_key(v) for v in r)
                                                   for r in self._rels[n].rows))
                     for n in self)


def world(**rels) -> World:
    """Convenience: ``world(R=(("A","B"), [(1,2)]))``."""
    return World({n: Relation(s, rows) for n, (s, rows) in rels.items()})


# -- normal form ----------------------------------------------------------------

def is_empty_marker(g) -> bool:
    return g == EMPTY_MARKER


def normalize_g(t: GMultitable) -> GMultitable:
    """Eliminate equalities from the global condition by substitution.

    Each equality class is replaced by its constant if it has one, else by its
    least variable.  Inequalities between distinct constants are dropped as
    tautologies; an inconsistent condition yields the empty-world-set marker.
    """
    atoms = t.global_
    uf = _Classes()
    for a in atoms:
        uf.add(a.left)
        uf.add(a.right)
    for a in atoms:
        if a.op == "=" and not uf.union(a.left, a.right):
            return GMultitable(t.tables, EMPTY_MARKER)
    rep = {}
    for root, members in uf.classes().items():
        c = uf.const.get(root)
        target = c if c is not None else min(members, key=value_key)
        for m in members:
            if isinstance(m, Var) and m != target:
                rep[m] = target
    out = set()
    for a in atoms:
        if a.op == "=":
            continue
        l, r = rep.get(a.left, a.left), rep.get(a.right, a.right)
        if l == r:
            return GMultitable(t.tables, EMPTY_MARKER)
        if isinstance(l, str) and isinstance(r, str):
            continue
        out.add(Atom(l, "!=", r))
    tables = {n: Table(tab.schema, [tuple(rep.get(v, v) for v in row) for row in tab.rows])
              for n, tab in t.tables.items()}
    return GMultitable(tables, frozenset(out))


def validate_x(t: XMultitable) -> bool:
    mutex = t.mutex
    ys = set(mutex.mu)
    g = flatten_conj(t.global_)
    if g is None or any(a.op != "!=" for a in g):
        return False
    if cond_variables(t.global_) & ys:
        return False
    for tab in t.tables.values():
        if any(v in ys for r in tab.rows for v in r):
            return False
        for c in tab.conds:
            atoms = flatten_conj(c)
            if atoms is None:
                return False
            split = mutex.member_formula(atoms)
            if split is None:
                return False
            _, rest = split
            if any(a.op != "=" for a in rest):
                return False
    return True


# -- bounded enumeration ----------------------------------------------------------

@dataclass(frozen=True)
class EnumBudget:
    """Pool control for world enumeration.

    The pool is the active domain, plus ``constants``, plus ``fresh`` new
    constants (default: one per variable that needs a free value).
    """
    fresh: int | None = None
    constants: tuple = ()
    max_valuations: int = 2_000_000

    def pool(self, active: Iterable[str], needed: int) -> list[str]:
        fresh = needed if self.fresh is None else self.fresh
        base = set(active) | {str(c) for c in self.constants}
        return sorted(base, key=value_key) + fresh_constants(fresh, base)


def _atoms_of(c):
    c = as_condition(c)
    if c is TRUE:
        return
    if isinstance(c, Atom):
        yield c
    elif isinstance(c, Not):
        yield from _atoms_of(c.part)
    elif isinstance(c, (And, Or)):
        for p in c.parts:
            yield from _atoms_of(p)


def variable_domains(conditions, data_vars, pool):
    """Domains for the enumeration.

    Variables that occur only in conditions and are only ever compared with
    constants need just those constants plus one outsider value; everything
    else ranges over the pool.
    """
    compared = {}
    linked = set()
    for c in conditions:
        for a in _atoms_of(c):
            l, r = a.left, a.right
            if isinstance(l, Var) and isinstance(r, Var):
                linked.update((l, r))
            for v, other in ((l, r), (r, l)):
                if isinstance(v, Var):
                    compared.setdefault(v, set())
                    if isinstance(other, str):
                        compared[v].add(other)
    doms = {}
    for v in data_vars:
        doms[v] = pool
    for v, consts in compared.items():
        if v in doms:
            continue
        if v in linked:
            doms[v] = pool
        else:
            cs = sorted(consts, key=value_key)
            doms[v] = cs + fresh_constants(1, consts)
    return doms


def iter_valuations(doms: Mapping, cap: int):
    names = sorted(doms, key=value_key)
    total = 1
    for v in names:
        total *= max(1, len(doms[v]))
        if total > cap:
            raise BudgetError(f"enumeration needs more than {cap} valuations")
    for combo in itertools.product(*(doms[v] for v in names)):
        yield dict(zip(names, combo))


def rep_enumerate(t, budget: EnumBudget | None = None) -> set:
    """All worlds of ``t`` (c-, g- or x-multitable) over the budget's pool."""
    budget = budget or EnumBudget()
    if isinstance(t, GMultitable):
        t = t.to_c()
    conds = [t.global_] + [c for tab in t.tables.values() for c in tab.conds]
    data_vars = t.data_variables()
    all_vars = t.variables()
    active = t.constants()
    pool_vars = [v for v in all_vars if v in data_vars]
    # fresh count defaults to the number of variables that range over the pool
    doms0 = variable_domains(conds, data_vars, ["*"])
    needed = sum(1 for v, d in doms0.items() if d == ["*"])
    if budget.fresh is not None and budget.fresh < len(pool_vars):
        raise BudgetError(
            f"pool has {budget.fresh} fresh constants, {len(pool_vars)} data variables need values")
    pool = budget.pool(active, needed)
    doms = variable_domains(conds, data_vars, pool)
    for v in all_vars:
        doms.setdefault(v, pool)
    out = set()
    names = list(t.tables)
    for val in iter_valuations(doms, budget.max_valuations):
        if not eval_condition(t.global_, val):
            continue
        rels = {}
        for n in names:
            tab = t.tables[n]
            rows = set()
            for row, c in zip(tab.rows, tab.conds):
                if c is TRUE or eval_condition(c, val):
                    rows.add(tuple(val[v] if isinstance(v, Var) else v for v in row))
            rels[n] = Relation._trusted(tab.schema, rows)
        out.add(World(rels))
    return out


def sorted_worlds(worlds) -> list:
    return sorted(worlds, key=World.sort_key)
