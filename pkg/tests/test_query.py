import pytest
from hypothesis import assume, given, settings, strategies as st

from gwsd.errors import FragmentError, SchemaError
from gwsd.formats import fmt_query, parse_query
from gwsd.query import (answer_world, constants_of, eval_on_world, eval_positive_on_x,
                        is_positive, schema_of)
from gwsd.relation import Relation
from gwsd.tables import EnumBudget, World, rep_enumerate, validate_x
from gwsd.translate import gwsd_to_x

from oracles import eval_query, table_consts, table_vars
from strategies import tuple_level_gwsds

W = World({"R": Relation(("A",), [("1",), ("2",)]), "S": Relation(("B",), [("2",), ("3",)])})


def as_dicts(rel):
    return {frozenset(zip(rel.schema, r)) for r in rel.rows}


@pytest.mark.parametrize("text", [
    "R", "R * S", "select[A=B](R * S)", "select[A=1](R)", "project[A](select[A=B](R * S))",
    "rename[A->B](R) + S", "R - rename[B->A](S)", "project[](R)", "project[](select[A=7](R)) * S",
    "{true}", "select[A!=2](R)",
])
def test_eval_matches_oracle(text):
    q = parse_query(text)
    assert as_dicts(eval_on_world(q, W)) == eval_query(q, W)
    assert parse_query(fmt_query(q)) == q


def test_schema_errors():
    with pytest.raises(SchemaError):
        schema_of(parse_query("R + S"), {"R": ("A",), "S": ("B",)})
    with pytest.raises(SchemaError):
        schema_of(parse_query("R * rename[B->A](S)"), {"R": ("A",), "S": ("B",)})


def test_fragment():
    assert is_positive(parse_query("project[A](select[A=B](R * S))"))
    assert not is_positive(parse_query("R - S"))
    assert not is_positive(parse_query("select[A!=1](R)"))
    assert constants_of(parse_query("select[A=1](R) + {true}")) >= {"1"}


POSITIVE = st.sampled_from([
    "R", "S", "R * S", "select[A=B](R * S)", "project[A](R) + rename[B->A](S)",
    "select[A=1](R)", "project[](select[A=B](R * S))", "project[B](select[A=B](R * S)) + S",
    "rename[A->C](R) * S", "{true}",
])


@settings(max_examples=80, deadline=None)
@given(tuple_level_gwsds(max_comps=2, max_rows=2), POSITIVE)
def test_positive_closure_on_x(w, text):
    q = parse_query(text)
    x = gwsd_to_x(w)
    assume(set(x.tables) == {"R", "S"})
    qx = eval_positive_on_x(q, x)
    assert validate_x(qx)
    consts = table_consts(x) | constants_of(q)
    k = len(table_vars(x))
    b = EnumBudget(fresh=k, constants=tuple(sorted(consts)))
    expected = {answer_world(q, wd) for wd in rep_enumerate(x, b)}
    assert rep_enumerate(qx, b) == expected


def test_difference_rejected_on_x(gold):
    x = gwsd_to_x(gold("three-comp.gwsd"))
    with pytest.raises(FragmentError):
        eval_positive_on_x(parse_query("R - R"), x)
