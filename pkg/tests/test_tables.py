import pytest
from hypothesis import given, settings

from gwsd.conditions import And, Or, eq, ne
from gwsd.errors import BudgetError
from gwsd.relation import Relation
from gwsd.tables import (EMPTY_MARKER, CMultitable, CTable, EnumBudget, GMultitable, Table,
                         World, XMultitable, normalize_g, rep_enumerate, validate_x, vmultitable)
from gwsd.values import Var

from oracles import fresh_pool, naive_rep_table, table_consts, table_vars
from strategies import c_multitables, g_multitables

x, y = Var("x"), Var("y")


def budget_for(*ts):
    k = max(len(table_vars(t)) for t in ts)
    consts = set().union(*(table_consts(t) for t in ts))
    return EnumBudget(fresh=k, constants=tuple(sorted(consts))), fresh_pool(consts, k)


def test_normalize_substitutes_equalities():
    t = GMultitable({"R": Table(("A",), [(x,)])}, frozenset([eq(x, 5), ne(x, y)]))
    n = normalize_g(t)
    assert n.tables["R"].rows == (("5",),)
    assert n.global_ == frozenset([ne(y, 5)])
    b, _ = budget_for(t, n)
    assert rep_enumerate(t, b) == rep_enumerate(n, b)


def test_normalize_trivial_and_contradiction():
    t = GMultitable({"R": Table(("A",), [(x,)])}, frozenset())
    assert normalize_g(t) == t
    bad = GMultitable({"R": Table(("A",), [(x,)])}, frozenset([eq(x, 1), eq(x, 2)]))
    assert normalize_g(bad).global_ == EMPTY_MARKER
    assert rep_enumerate(normalize_g(bad)) == set()


def test_validate_x(gold):
    t = gold("one-comp.xtable")
    assert validate_x(t)
    (x1,) = t.mutex.variables
    tab = t.tables["R"]
    broken = XMultitable({"R": CTable(tab.schema, [(x1, "1")] + list(tab.rows[1:]),
                                      tab.conds)}, t.global_, t.mutex)
    assert not validate_x(broken)
    disj = XMultitable({"R": CTable(tab.schema, tab.rows,
                                    (Or((eq(x1, 1), eq(x, 1))),) + tab.conds[1:])},
                       t.global_, t.mutex)
    assert not validate_x(disj)


def test_census_has_24_worlds(gold):
    ws = rep_enumerate(gold("census.ctable"))
    assert len(ws) == 24
    for w in ws:
        ssn = [r[0] for r in w["R"].rows]
        assert len(set(ssn)) == 2


def test_vtable_single_world():
    t = vmultitable({"R": Table(("A",), [("1",), ("2",)])})
    assert rep_enumerate(t) == {World({"R": Relation(("A",), [("1",), ("2",)])})}


def test_gtable_contains_displayed_world(gold):
    t = gold("gtable-rs.gtable")
    ws = rep_enumerate(t, EnumBudget(fresh=2, constants=("1", "2", "3")))
    assert gold("gtable-rs.world") in ws


def test_budget_error():
    t = GMultitable({"R": Table(("A",), [(x,), (y,)])}, frozenset())
    with pytest.raises(BudgetError):
        rep_enumerate(t, EnumBudget(fresh=1))


@settings(max_examples=80, deadline=None)
@given(g_multitables())
def test_normalize_preserves_rep(t):
    n = normalize_g(t)
    assert all(a.op == "!=" for a in n.global_)
    b, _ = budget_for(t)
    assert rep_enumerate(n, b) == rep_enumerate(t, b)


@settings(max_examples=80, deadline=None)
@given(c_multitables())
def test_rep_matches_naive_oracle(t):
    b, pool = budget_for(t)
    assert rep_enumerate(t, b) == naive_rep_table(t, pool)


@settings(max_examples=50, deadline=None)
@given(g_multitables())
def test_rep_monotone_in_pool(t):
    b, _ = budget_for(t)
    bigger = EnumBudget(fresh=b.fresh + 1, constants=b.constants)
    assert rep_enumerate(t, b) <= rep_enumerate(t, bigger)
