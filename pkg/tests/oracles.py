"""Independent brute-force oracles used by the tests.

Nothing here calls the package's enumeration, decision or factorization
code; only the plain data classes are shared.
"""
from __future__ import annotations

import itertools

from gwsd.conditions import And, Atom, Not, Or, _True
from gwsd.relation import Relation
from gwsd.tables import GMultitable, World
from gwsd.values import BOT, Var


def holds(c, val) -> bool:
    if isinstance(c, (frozenset, set, list, tuple)):
        return all(holds(a, val) for a in c)
    if isinstance(c, _True):
        return True
    if isinstance(c, Atom):
        l = val[c.left] if isinstance(c.left, Var) else c.left
        r = val[c.right] if isinstance(c.right, Var) else c.right
        return (l == r) == (c.op == "=")
    if isinstance(c, And):
        return all(holds(p, val) for p in c.parts)
    if isinstance(c, Or):
        return any(holds(p, val) for p in c.parts)
    if isinstance(c, Not):
        return not holds(c.part, val)
    raise TypeError(c)


def cond_vars(c) -> set:
    if isinstance(c, (frozenset, set, list, tuple)):
        return set().union(*(cond_vars(a) for a in c)) if c else set()
    if isinstance(c, Atom):
        return {t for t in (c.left, c.right) if isinstance(t, Var)}
    if isinstance(c, (And, Or)):
        return set().union(*(cond_vars(p) for p in c.parts))
    if isinstance(c, Not):
        return cond_vars(c.part)
    return set()


def cond_consts(c) -> set:
    if isinstance(c, (frozenset, set, list, tuple)):
        return set().union(*(cond_consts(a) for a in c)) if c else set()
    if isinstance(c, Atom):
        return {t for t in (c.left, c.right) if isinstance(t, str)}
    if isinstance(c, (And, Or)):
        return set().union(*(cond_consts(p) for p in c.parts))
    if isinstance(c, Not):
        return cond_consts(c.part)
    return set()


def _ground(row, val):
    return tuple(val[v] if isinstance(v, Var) else v for v in row)


def table_vars(t) -> set:
    if isinstance(t, GMultitable):
        t = t.to_c()
    out = cond_vars(t.global_)
    for tab in t.tables.values():
        for r, c in zip(tab.rows, tab.conds):
            out |= {v for v in r if isinstance(v, Var)} | cond_vars(c)
    return out


def table_consts(t) -> set:
    if isinstance(t, GMultitable):
        t = t.to_c()
    out = cond_consts(t.global_)
    for tab in t.tables.values():
        for r, c in zip(tab.rows, tab.conds):
            out |= {v for v in r if isinstance(v, str)} | cond_consts(c)
    return out


def naive_rep_table(t, pool) -> set:
    """Every valuation of every variable over ``pool``."""
    if isinstance(t, GMultitable):
        t = t.to_c()
    vs = sorted(table_vars(t), key=lambda v: v.name)
    out = set()
    for combo in itertools.product(pool, repeat=len(vs)):
        val = dict(zip(vs, combo))
        if not holds(t.global_, val):
            continue
        rels = {}
        for n, tab in t.tables.items():
            rows = {_ground(r, val) for r, c in zip(tab.rows, tab.conds) if holds(c, val)}
            rels[n] = Relation(tab.schema, rows)
        out.add(World(rels))
    return out


def split(name: str):
    parts = name.split(".")
    if len(parts) == 2:
        return ("R", parts[0], parts[1])
    return (".".join(parts[:-2]), parts[-2], parts[-1])


def wsd_vars(w) -> set:
    out = cond_vars(w.global_)
    for c in w.components:
        out |= {v for r in c.rows for v in r if isinstance(v, Var)}
    return out


def wsd_consts(w) -> set:
    out = cond_consts(w.global_)
    for c in w.components:
        out |= {v for r in c.rows for v in r if isinstance(v, str)}
    return out


def decode_row(schema, row) -> World:
    """Worlds of one composed row: slots with a BOT are absent."""
    rels: dict = {}
    slots: dict = {}
    for a, v in zip(schema, row):
        r, d, attr = split(a)
        rels.setdefault(r, [])
        if attr not in rels[r]:
            rels[r].append(attr)
        slots.setdefault((r, d), {})[attr] = v
    out = {r: set() for r in rels}
    for (r, d), vals in slots.items():
        tup = tuple(vals[a] for a in rels[r])
        if not any(v is BOT for v in tup):
            out[r].add(tup)
    return World({r: Relation(rels[r], out[r]) for r in rels})


def naive_rep_wsd(w, pool) -> set:
    vs = sorted(wsd_vars(w), key=lambda v: v.name)
    schema = [a for c in w.components for a in c.schema]
    out = set()
    for choice in itertools.product(*(c.rows for c in w.components)):
        row = tuple(v for r in choice for v in r)
        for combo in itertools.product(pool, repeat=len(vs)):
            val = dict(zip(vs, combo))
            if holds(w.global_, val):
                out.add(decode_row(schema, _ground(row, val)))
    return out


def fresh_pool(consts, k: int) -> list:
    consts = sorted(set(consts))
    return consts + [f"~{i}" for i in range(1, k + 1)]


# -- combinatorial oracles ------------------------------------------------------

def exact_cover(X, C):
    X = set(X)
    for k in range(len(C) + 1):
        for pick in itertools.combinations(range(len(C)), k):
            chosen = [set(C[i]) for i in pick]
            if sum(len(s) for s in chosen) == len(X) and set().union(*chosen) == X:
                return pick
    return None


def _lit(l, assign):
    return assign[abs(l)] if l > 0 else not assign[abs(l)]


def cnf_satisfiable(clauses) -> bool:
    vs = sorted({abs(l) for c in clauses for l in c})
    for bits in itertools.product([False, True], repeat=len(vs)):
        a = dict(zip(vs, bits))
        if all(any(_lit(l, a) for l in c) for c in clauses):
            return True
    return False


def dnf_tautology(clauses) -> bool:
    vs = sorted({abs(l) for c in clauses for l in c})
    for bits in itertools.product([False, True], repeat=len(vs)):
        a = dict(zip(vs, bits))
        if not any(all(_lit(l, a) for l in c) for c in clauses):
            return False
    return True


def is_product_of(rel: Relation, parts) -> bool:
    """``rel`` equals the cartesian product of ``parts`` (as attribute sets)."""
    cols = {a: i for i, a in enumerate(rel.schema)}
    projs = [{tuple(r[cols[a]] for a in p) for r in rel.rows} for p in parts]
    total = 1
    for p in projs:
        total *= len(p)
    return total == len(rel.rows)


def oracle_factors(rel: Relation) -> set:
    """Prime factor schemata by exhaustive search over set partitions."""
    attrs = list(rel.schema)
    if not rel.rows:
        return {frozenset(attrs)}

    def partitions(items):
        if not items:
            yield []
            return
        head, rest = items[0], items[1:]
        for p in partitions(rest):
            for i in range(len(p)):
                yield p[:i] + [[head] + p[i]] + p[i + 1:]
            yield [[head]] + p

    best = None
    for p in partitions(attrs):
        if is_product_of(rel, p) and (best is None or len(p) > len(best)):
            best = p
    return {frozenset(b) for b in best}


def eval_query(q, w) -> set:
    """Answer of a relational algebra query as a set of attribute->value dicts."""
    kind = type(q).__name__
    if kind == "Base":
        r = w[q.name]
        return {frozenset(zip(r.schema, row)) for row in r.rows}
    if kind == "Literal":
        return {frozenset(zip(q.schema, row)) for row in q.rows}
    if kind == "Select":
        out = set()
        for t in eval_query(q.child, w):
            d = dict(t)
            ok = True
            for a, op, r in q.conds:
                rv = d[r.name] if type(r).__name__ == "Ref" else r
                if (d[a] == rv) != (op == "="):
                    ok = False
            if ok:
                out.add(t)
        return out
    if kind == "Project":
        rows = eval_query(q.child, w)
        if not q.attrs:
            return {frozenset({("_", "true")})} if rows else set()
        return {frozenset((a, dict(t)[a]) for a in q.attrs) for t in rows}
    if kind == "Product":
        l, r = eval_query(q.left, w), eval_query(q.right, w)
        strip = lambda s: {frozenset(p for p in t if p[0] != "_") for t in s}
        if any(("_", "true") in t for t in l):
            return strip(r) if l else set()
        if any(("_", "true") in t for t in r):
            return strip(l) if r else set()
        return {a | b for a in l for b in r}
    if kind == "Union":
        return eval_query(q.left, w) | eval_query(q.right, w)
    if kind == "Difference":
        return eval_query(q.left, w) - eval_query(q.right, w)
    if kind == "Rename":
        m = dict(q.mapping)
        return {frozenset((m.get(a, a), v) for a, v in t) for t in eval_query(q.child, w)}
    raise TypeError(kind)


def world_tuples(world, rel) -> set:
    return set(world[rel].rows) if rel in world else set()


def oracle_verdicts(worlds, rel, t, inst) -> dict:
    """Tuple/instance possibility and certainty read off an explicit world-set."""
    def same(world):
        names = set(world) | set(inst)
        return all(world_tuples(world, n) == world_tuples(inst, n) for n in names)
    return {
        "tuple_possible": any(t in world_tuples(w, rel) for w in worlds),
        "tuple_certain": all(t in world_tuples(w, rel) for w in worlds),
        "instance_possible": any(same(w) for w in worlds),
        "instance_certain": all(same(w) for w in worlds),
    }
