"""Translations between gWSDs, x-multitables, c-multitables and g-tabsets."""
from __future__ import annotations

import itertools
from typing import Iterator

from .conditions import (Atom, MutexSet, TRUE, conj, entails, eq, ne, substitute,
                         terms as cond_terms)
from .errors import CapError
from .relation import Relation
from .tables import EMPTY_MARKER, CMultitable, CTable, GMultitable, Table, XMultitable
from .tst import Tabset, normalize_global, tabset_to_gtst
from .values import BOT, Var, value_key
from .wsd import GWSD

ATLAS_TERM_CAP = 8


# -- gWSD to x-multitable -------------------------------------------------------

def gwsd_to_x(w: GWSD, prefix: str = "x") -> XMultitable:
    layout = w.layout
    tables = {r: ([], []) for r in layout.attrs}
    taken = {v.name for v in w.variables()}
    if any(len(c) == 0 for c in w.components):
        return XMultitable({r: CTable(layout.attrs[r], []) for r in layout.attrs},
                           EMPTY_MARKER, MutexSet({}))
    mu, k = {}, 0
    for j, comp in enumerate(w.components, start=1):
        name = f"{prefix}{j}"
        while name in taken:
            k += 1
            name = f"{prefix}{j}_{k}"
        y = Var(name)
        mu[y] = len(comp) - 1
        mutex = MutexSet({y: mu[y]})
        cols = {a: i for i, a in enumerate(comp.schema)}
        slots = []
        for a in comp.schema:
            s = layout.slot_of(a)
            if s not in slots:
                slots.append(s)
        for i, row in enumerate(comp.rows, start=1):
            cond = mutex.cond(y, i)
            for r, d in slots:
                idx = [cols.get(n) for n in layout.slot_columns(r, d)]
                if any(p is None for p in idx):
                    raise ValueError("gwsd_to_x needs a tuple-level decomposition")
                vals = tuple(row[p] for p in idx)
                if any(v is BOT for v in vals):
                    continue
                tables[r][0].append(vals)
                tables[r][1].append(cond)
    ctabs = {r: CTable(layout.attrs[r], rows, conds) for r, (rows, conds) in tables.items()}
    return XMultitable(ctabs, w.global_, MutexSet(mu))


# -- c-multitable to g-tabset ------------------------------------------------------

def _partitions(items: list, max_const_per_block: int = 1) -> Iterator[list]:
    """Set partitions of ``items``; a block holds at most one constant."""
    def rec(i, blocks):
        if i == len(items):
            yield [list(b) for b in blocks]
            return
        t = items[i]
        for b in blocks:
            if isinstance(t, str) and any(isinstance(u, str) for u in b):
                continue
            b.append(t)
            yield from rec(i + 1, blocks)
            b.pop()
        blocks.append([t])
        yield from rec(i + 1, blocks)
        blocks.pop()
    yield from rec(0, [])


def _theta_of(blocks) -> frozenset:
    flat = [(t, k) for k, b in enumerate(blocks) for t in b]
    out = set()
    for (a, ka), (b, kb) in itertools.combinations(flat, 2):
        if isinstance(a, str) and isinstance(b, str):
            continue
        out.add(Atom(a, "=" if ka == kb else "!=", b))
    return frozenset(out)


def table_terms(t: CMultitable) -> list:
    out = set(t.variables()) | set(t.constants())
    return sorted(out, key=value_key)


def theta_atlas(t: CMultitable, cap: int = ATLAS_TERM_CAP) -> list:
    """All complete consistent conjunctions over the terms of ``t`` entailing its
    global condition, one per admissible set partition of the terms."""
    items = table_terms(t)
    if len(items) > cap:
        raise CapError(f"{len(items)} terms exceed the atlas cap of {cap}")
    out = []
    for blocks in _partitions(items):
        theta = _theta_of(blocks)
        if entails(theta, t.global_):
            out.append((theta, blocks))
    return out


def _representatives(blocks) -> dict:
    rep = {}
    for b in blocks:
        consts = [u for u in b if isinstance(u, str)]
        target = consts[0] if consts else min(b, key=value_key)
        for u in b:
            if isinstance(u, Var):
                rep[u] = target
    return rep


def c_to_gtabset(t: CMultitable, cap: int = ATLAS_TERM_CAP) -> Tabset:
    members = []
    for theta, blocks in theta_atlas(t, cap):
        rep = _representatives(blocks)
        tables = {}
        for name, tab in t.tables.items():
            rows = [tuple(rep.get(v, v) for v in row)
                    for row, c in zip(tab.rows, tab.conds) if entails(theta, c)]
            tables[name] = Table(tab.schema, rows)
        glob = set()
        for a in theta:
            if a.op != "!=":
                continue
            l, r = rep.get(a.left, a.left), rep.get(a.right, a.right)
            if isinstance(l, str) and isinstance(r, str):
                continue
            glob.add(Atom(l, "!=", r))
        members.append(GMultitable(tables, frozenset(glob)))
    if not members:
        # the empty world-set: keep the schema with a contradictory condition
        members.append(GMultitable({n: Table(tab.schema, []) for n, tab in t.tables.items()},
                                   EMPTY_MARKER))
        return Tabset(tuple(members))
    return Tabset(tuple(members))


def gtabset_to_gwsd(ts: Tabset) -> GWSD:
    # every relation keeps at least one (possibly all-BOT) slot
    maxima = {r: max(1, ts.maxima().get(r, 0)) for r in ts.relations()}
    g = normalize_global(tabset_to_gtst(ts, maxima))
    phi = g.common_phi() if g.rows else EMPTY_MARKER
    if not g.rows:
        return GWSD([Relation(g.schema, [])], EMPTY_MARKER) if g.schema else \
            GWSD([Relation(["R.d1.A"], [])], EMPTY_MARKER)
    return GWSD([Relation(g.schema, g.rows)], phi)


def c_to_gwsd(t: CMultitable, cap: int = ATLAS_TERM_CAP) -> GWSD:
    return gtabset_to_gwsd(c_to_gtabset(t, cap))


# -- simplification ------------------------------------------------------------------

def _row_vars(row):
    return {v for v in row if isinstance(v, Var)}


def _content(row, comp_schema, layout):
    """Set of (relation, tuple) pairs a component row contributes."""
    cols = {a: i for i, a in enumerate(comp_schema)}
    seen, out = set(), set()
    for a in comp_schema:
        r, d, _ = layout.where[a]
        if (r, d) in seen:
            continue
        seen.add((r, d))
        vals = tuple(row[cols[n]] for n in layout.slot_columns(r, d))
        if not any(v is BOT for v in vals):
            out.add((r, vals))
    return frozenset(out)


def _subst_content(content, mapping):
    return frozenset((r, tuple(mapping.get(v, v) for v in vals)) for r, vals in content)


def _subst_atoms(atoms, mapping):
    out = set()
    for a in atoms:
        l, r = mapping.get(a.left, a.left), mapping.get(a.right, a.right)
        if l == r:
            return None
        if isinstance(l, str) and isinstance(r, str):
            continue
        out.add(Atom(l, "!=", r))
    return frozenset(out)


def _match(src_vars, dst_vars, src, dst, limit=6):
    """A bijection ``src_vars -> dst_vars`` taking ``src`` (content, atoms) to ``dst``."""
    src_vars, dst_vars = sorted(src_vars), sorted(dst_vars)
    if len(src_vars) != len(dst_vars) or len(src_vars) > limit:
        return None
    for perm in itertools.permutations(dst_vars):
        m = dict(zip(src_vars, perm))
        if _subst_content(src[0], m) == dst[0] and _subst_atoms(src[1], m) == dst[1]:
            return m
    return None


def simplify_gwsd(w: GWSD, max_rounds: int = 100) -> GWSD:
    """Best-effort size reduction preserving the represented world-set.

    Works on tuple-level components and on *private* variables only, i.e.
    variables that occur in a single row and whose global atoms mention no
    variable of another row.  Rows equal up to renaming private variables are
    deduplicated; a row equal to another row ``r`` with a private variable
    ``y`` of ``r`` instantiated to ``t`` is folded into ``r`` by dropping the
    atom ``y != t``.  Atoms on variables that no longer occur are removed.
    """
    if any(a.left == a.right for a in w.global_):
        return w
    if not w.is_tuple_level():
        return _drop_dead_atoms(w)
    comps = [list(c.rows) for c in w.components]
    glob = set(w.global_)
    for _ in range(max_rounds):
        changed = False
        occurs = {}
        for k, rows in enumerate(comps):
            for i, row in enumerate(rows):
                for v in _row_vars(row):
                    occurs.setdefault(v, set()).add((k, i))
        private = {v for v, locs in occurs.items() if len(locs) == 1}
        for a in glob:
            vs = [u for u in a.terms() if isinstance(u, Var)]
            if len(vs) == 2 and occurs.get(vs[0]) != occurs.get(vs[1]):
                private -= set(vs)
            for u in vs:
                if u not in occurs:
                    private.discard(u)

        for k, rows in enumerate(comps):
            schema = w.components[k].schema
            info = []
            for row in rows:
                pv = _row_vars(row)
                if not pv <= private:
                    info.append(None)
                    continue
                atoms = frozenset(a for a in glob if set(a.terms()) & pv)
                info.append((pv, _content(row, schema, w.layout), atoms))
            # dedupe up to private renaming
            for i, j in itertools.permutations(range(len(rows)), 2):
                if info[i] is None or info[j] is None or i > j:
                    continue
                pi, ci, ai = info[i]
                pj, cj, aj = info[j]
                if _match(pj, pi, (cj, aj), (ci, ai)) is not None:
                    glob -= aj
                    del rows[j]
                    changed = True
                    break
            if changed:
                break
            # fold rows that instantiate a private variable of another row
            for i in range(len(rows)):
                if info[i] is None:
                    continue
                pv, content, atoms = info[i]
                for a in sorted(atoms, key=repr):
                    ys = [u for u in (a.left, a.right) if u in pv]
                    for y in ys:
                        t = a.right if y == a.left else a.left
                        inst = {y: t}
                        c2 = _subst_content(content, inst)
                        a2 = _subst_atoms(atoms - {a}, inst)
                        if a2 is None:
                            continue
                        rest = pv - {y}
                        for j in range(len(rows)):
                            if j == i or info[j] is None:
                                continue
                            pj, cj, aj = info[j]
                            if _match(pj, rest, (cj, aj), (c2, a2)) is None:
                                continue
                            glob.discard(a)
                            glob -= aj
                            del rows[j]
                            changed = True
                            break
                        if changed:
                            break
                    if changed:
                        break
                if changed:
                    break
            if changed:
                break
        if not changed:
            break
    new = GWSD([Relation(c.schema, rows) for c, rows in zip(w.components, comps)],
               frozenset(glob))
    return _drop_dead_atoms(new)


def _drop_dead_atoms(w: GWSD) -> GWSD:
    live = w.data_variables()
    if any(a.left == a.right for a in w.global_):
        return w
    keep = frozenset(a for a in w.global_
                     if all(u in live for u in a.terms() if isinstance(u, Var)))
    if keep == w.global_:
        return w
    return GWSD(w.components, keep)
