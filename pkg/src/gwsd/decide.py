"""Decision problems on gWSDs: possibility and certainty of tuples and
instances, their query variants, and the empty-world test.

Polynomial procedures are used where they exist; the remaining problems are
decided by bounded search and reported with ``method="brute-force"``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Mapping

from .conditions import Atom, eq, eval_condition, flatten_conj, satisfiable_conjunction
from .errors import LevelError, SchemaError
from .query import Query, constants_of, eval_on_world, eval_positive_on_x, is_positive
from .relation import Relation
from .tables import EnumBudget, World, XMultitable
from .translate import gwsd_to_x
from .tst import inline_inverse_world
from .values import BOT, Var, as_value, value_key
from .wsd import GWSD, rep_enumerate_wsd, to_tuple_level

PTIME = "ptime"
BRUTE = "brute-force"


@dataclass(frozen=True)
class Decision:
    verdict: bool
    method: str
    witness: Any = None

    def __bool__(self):
        return self.verdict


def _const_tuple(t) -> tuple:
    out = tuple(as_value(v) for v in t)
    for v in out:
        if not isinstance(v, str):
            raise SchemaError(f"decision tuples must be constant, got {v!r}")
    return out


def _possible_in_x(x: XMultitable, rel: str, t: tuple):
    if rel not in x.tables:
        raise SchemaError(f"unknown relation {rel!r}")
    tab = x.tables[rel]
    if len(t) != len(tab.schema):
        raise SchemaError(f"tuple {t} does not match schema {tab.schema}")
    glob = flatten_conj(x.global_)
    if not satisfiable_conjunction(glob):
        return None
    for i, (row, cond) in enumerate(zip(tab.rows, tab.conds)):
        atoms = set(glob) | set(flatten_conj(cond))
        bad = False
        for v, c in zip(row, t):
            if isinstance(v, str):
                if v != c:
                    bad = True
                    break
            else:
                atoms.add(eq(v, c))
        if bad:
            continue
        ok, val = satisfiable_conjunction(atoms, with_witness=True)
        if ok:
            grounded = tuple(val.get(v, v) for v in row)
            assert grounded == t and eval_condition(cond, val), "witness check failed"
            return {"row": i, "valuation": val}
    return None


def tuple_possible(w: GWSD, rel: str, t) -> Decision:
    t = _const_tuple(t)
    x = gwsd_to_x(to_tuple_level(w))
    wit = _possible_in_x(x, rel, t)
    return Decision(wit is not None, PTIME, wit)


def _require_tuple_level(w: GWSD, what: str):
    if not w.is_tuple_level():
        raise LevelError(f"{what} is only decided in polynomial time for tuple-level "
                         "decompositions; it is coNP-hard at attribute level")


def _slot_tuples(w: GWSD, k: int, row):
    """Non-BOT slot tuples of component ``k``'s ``row`` as (relation, values)."""
    comp = w.components[k]
    cols = {a: i for i, a in enumerate(comp.schema)}
    seen = []
    for a in comp.schema:
        s = w.layout.slot_of(a)
        if s not in seen:
            seen.append(s)
    out = []
    for r, d in seen:
        vals = tuple(row[cols[n]] for n in w.layout.slot_columns(r, d))
        if not any(v is BOT for v in vals):
            out.append((r, vals))
    return out


def tuple_certain(w: GWSD, rel: str, t) -> Decision:
    t = _const_tuple(t)
    _require_tuple_level(w, "tuple certainty")
    if rel not in w.layout.attrs:
        raise SchemaError(f"unknown relation {rel!r}")
    if w.is_empty():
        return Decision(True, PTIME, {"reason": "empty world-set"})
    for k, comp in enumerate(w.components):
        if all((rel, t) in _slot_tuples(w, k, row) for row in comp.rows):
            return Decision(True, PTIME, {"component": k})
    return Decision(False, PTIME, None)


def _instance_tables(w: GWSD, inst: Mapping):
    want = {}
    for r in w.layout.attrs:
        if r in inst:
            want[r] = set(inst[r].aligned(w.layout.attrs[r]).rows)
        else:
            want[r] = set()
    extra = [r for r in inst if r not in w.layout.attrs and len(inst[r])]
    return want, bool(extra)


def _match_instance(slots, want, global_):
    """Valuation taking the slot tuples onto exactly the tuples of ``want``."""
    targets = {r: sorted(ts, key=lambda u: tuple(map(value_key, u))) for r, ts in want.items()}

    def unify(vals, target, val):
        new = dict(val)
        for v, c in zip(vals, target):
            if isinstance(v, Var):
                if v in new and new[v] != c:
                    return None
                new[v] = c
            elif v != c:
                return None
        return new

    def rec(i, val, covered):
        if i == len(slots):
            for r, ts in want.items():
                if len(covered.get(r, ())) != len(ts):
                    return None
            rest = []
            for a in global_:
                l, r = val.get(a.left, a.left), val.get(a.right, a.right)
                if isinstance(l, str) and isinstance(r, str):
                    if l == r:
                        return None
                    continue
                rest.append(Atom(l, "!=", r))
            ok, free = satisfiable_conjunction(rest, with_witness=True)
            if not ok:
                return None
            full = dict(free)
            full.update(val)
            return full
        r, vals = slots[i]
        for target in targets.get(r, ()):
            new = unify(vals, target, val)
            if new is None:
                continue
            cov = dict(covered)
            cov[r] = covered.get(r, frozenset()) | {target}
            got = rec(i + 1, new, cov)
            if got is not None:
                return got
        return None

    return rec(0, {}, {})


def instance_possible(w: GWSD, inst: Mapping) -> Decision:
    want, extra = _instance_tables(w, inst)
    if extra or any(len(c) == 0 for c in w.components):
        return Decision(False, BRUTE, None)
    schema = w.schema
    for choice in itertools.product(*(range(len(c)) for c in w.components)):
        rows = [w.components[k].rows[i] for k, i in enumerate(choice)]
        slots = []
        for k, row in enumerate(rows):
            slots.extend(_slot_tuples(w, k, row))
        if not w.is_tuple_level():
            full = tuple(v for row in rows for v in row)
            slots = _full_slots(w, full)
        val = _match_instance(slots, want, w.global_)
        if val is None:
            continue
        full = tuple(v for row in rows for v in row)
        grounded = tuple(val.get(v, v) if isinstance(v, Var) else v for v in full)
        got = inline_inverse_world(grounded, w.layout, schema)
        assert all(set(got[r].rows) == want[r] for r in want), "witness check failed"
        return Decision(True, BRUTE, {"rows": choice, "valuation": val})
    return Decision(False, BRUTE, None)


def _full_slots(w: GWSD, full):
    pos = w.layout.positions(w.schema)
    out = []
    for (r, d), idx in pos.items():
        vals = tuple(full[i] for i in idx)
        if not any(v is BOT for v in vals):
            out.append((r, vals))
    return out


def instance_certain(w: GWSD, inst: Mapping) -> Decision:
    _require_tuple_level(w, "instance certainty")
    want, extra = _instance_tables(w, inst)
    if w.is_empty():
        return Decision(True, PTIME, {"reason": "empty world-set"})
    if extra:
        return Decision(False, PTIME, {"reason": "instance mentions unknown relations"})
    if w.data_variables():
        return Decision(False, PTIME, {"reason": "variables admit several worlds"})
    for r, ts in want.items():
        for t in ts:
            if not tuple_certain(w, r, t).verdict:
                return Decision(False, PTIME, {"missing": (r, t)})
    for k, comp in enumerate(w.components):
        for row in comp.rows:
            for r, vals in _slot_tuples(w, k, row):
                if vals not in want[r]:
                    return Decision(False, PTIME, {"extra": (r, vals)})
    return Decision(True, PTIME, None)


# -- query variants ----------------------------------------------------------------

PROBLEMS = ("tuple_q_poss", "tuple_q_cert", "inst_q_poss", "inst_q_cert")


def _query_budget(budget, q, target):
    budget = budget or EnumBudget()
    extra = set(constants_of(q))
    if isinstance(target, Relation):
        extra |= {v for row in target.rows for v in row}
    elif target is not None:
        extra |= set(target)
    consts = tuple(sorted(set(budget.constants) | extra, key=value_key))
    return EnumBudget(budget.fresh, consts, budget.max_valuations)


def q_decide(problem: str, w: GWSD, q: Query, target, budget: EnumBudget | None = None,
             name: str = "Q") -> Decision:
    if problem not in PROBLEMS:
        raise ValueError(f"unknown problem {problem!r}; expected one of {PROBLEMS}")
    if problem.startswith("tuple"):
        target = _const_tuple(target)
    if problem == "tuple_q_poss" and is_positive(q):
        x = gwsd_to_x(to_tuple_level(w))
        ans = eval_positive_on_x(q, x, name)
        wit = _possible_in_x(ans, name, target)
        return Decision(wit is not None, PTIME, wit)
    b = _query_budget(budget, q, target)
    worlds = sorted(rep_enumerate_wsd(w, b), key=World.sort_key)
    want_rel = None
    if problem.startswith("inst"):
        want_rel = target if isinstance(target, Relation) else None

    def holds(world):
        a = eval_on_world(q, world)
        if problem.startswith("tuple"):
            return target in a.rowset if len(target) == len(a.schema) else False
        return a == want_rel

    if problem.endswith("poss"):
        for wd in worlds:
            if holds(wd):
                return Decision(True, BRUTE, {"world": wd})
        return Decision(False, BRUTE, None)
    for wd in worlds:
        if not holds(wd):
            return Decision(False, BRUTE, {"counterexample": wd})
    return Decision(True, BRUTE, None)


def empty_world_possible(w: GWSD) -> Decision:
    """Whether some choice of component rows encodes the empty world."""
    pos = w.layout.positions(w.schema)
    owner = {}
    for k, c in enumerate(w.components):
        for i, a in enumerate(c.schema):
            owner[a] = (k, i)
    slot_cols = [[owner[w.schema[i]] for i in idx] for idx in pos.values()]
    bad_self = any(a.left == a.right for a in w.global_)
    if bad_self:
        return Decision(False, BRUTE, None)
    for choice in itertools.product(*(range(len(c)) for c in w.components)):
        rows = [w.components[k].rows[i] for k, i in enumerate(choice)]
        if all(any(rows[k][i] is BOT for k, i in cols) for cols in slot_cols):
            return Decision(True, BRUTE, {"rows": choice,
                                          "tuples": [rows[k] for k in range(len(rows))]})
    return Decision(False, BRUTE, None)
