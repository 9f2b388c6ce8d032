import random
import time

import pytest
from hypothesis import given, settings, strategies as st

from gwsd import factorize as fz
from gwsd.errors import CapError, SchemaError
from gwsd.relation import Relation, product_all
from gwsd.values import BOT
from gwsd.wsd import GWSD, rep_enumerate_wsd

from oracles import is_product_of, oracle_factors
from strategies import relations


def schema_sets(f):
    return {frozenset(s) for s in f.schemas()}


def random_pivot(seed):
    rng = random.Random(seed)
    return lambda cands: rng.choice(cands)


def test_three_factors(gold):
    s = gold("three-factors.rel")[1]
    f = fz.factorize_prime(s)
    assert schema_sets(f) == {frozenset("ABC"), frozenset("D"), frozenset("E")}
    abc = next(x for x in f if len(x.schema) == 3)
    assert len(abc) == 3
    for seed in range(3):
        assert fz.factorize_prime(s, random_pivot(seed)) == f
    assert f.product(s.schema) == s


def test_trivial_inputs():
    s = Relation(("A",), [("1",), ("2",)])
    assert fz.factorize_prime(s).factors == (s,)
    e = Relation(("A", "B"), [])
    assert len(fz.factorize_prime(e)) == 1


def test_divides():
    r = product_all([Relation(("A",), [("1",), ("2",)]), Relation(("B",), [("3",), ("4",)])])
    assert fz.divides(Relation(("A",), [("1",), ("2",)]), r)
    assert not fz.divides(Relation(("A",), [("1",)]), r)
    with pytest.raises(SchemaError):
        fz.divides(r, r)


def test_powerset_cap():
    s = Relation([f"A{i}" for i in range(9)], [tuple("1" * 9)])
    with pytest.raises(CapError):
        fz.powerset_oracle(s)


def test_census_decomposition(gold):
    one = gold("census-1wsd.wsd")
    d = fz.decompose_wsd_maximal(one)
    assert d.level == "attribute" and d.maximal
    assert d.wsd == gold("census.wsd")
    assert sorted(d.wsd.sizes()) == [1, 1, 2, 3, 4]
    assert rep_enumerate_wsd(d.wsd) == rep_enumerate_wsd(one)


def test_tuple_level_decomposition(gold):
    w = gold("four-worlds.wsd")
    one = GWSD([product_all(w.components)])
    d = fz.decompose_wsd_maximal(one)
    assert d.level == "tuple"
    assert d.wsd == w
    again = fz.decompose_wsd_maximal(d.wsd)
    assert again.wsd == d.wsd


def test_variables_flag_non_maximal(gold):
    assert not fz.decompose_wsd_maximal(gold("one-comp.gwsd")).maximal


def test_scaling_ten_binary():
    parts = [Relation((f"A{i}",), [("0",), ("1",)]) for i in range(10)]
    s = product_all(parts)
    t0 = time.perf_counter()
    f = fz.factorize_prime(s)
    assert time.perf_counter() - t0 < 5
    assert len(f) == 10 and all(len(x.schema) == 1 for x in f)


@settings(max_examples=100, deadline=None)
@given(relations())
def test_matches_oracles(s):
    f = fz.factorize_prime(s)
    assert schema_sets(f) == oracle_factors(s)
    assert fz.factorize_lowmem(s) == f
    assert fz.powerset_oracle(s) == f


@settings(max_examples=100, deadline=None)
@given(relations(), st.integers(0, 10**6))
def test_sound_prime_unique(s, seed):
    f = fz.factorize_prime(s)
    assert f.product(s.schema) == s
    assert is_product_of(s, f.schemas())
    for x in f:
        assert len(fz.powerset_oracle(x)) == 1
    assert fz.factorize_prime(s, random_pivot(seed)) == f


@settings(max_examples=60, deadline=None)
@given(relations(max_arity=3), relations(max_arity=2))
def test_product_propagation(a, b):
    b = b.renamed({x: x.lower() for x in b.schema}) if hasattr(b, "renamed") else \
        Relation([x.lower() for x in b.schema], b.rows)
    p = product_all([a, b])
    got = schema_sets(fz.factorize_prime(p))
    assert got == schema_sets(fz.factorize_prime(a)) | schema_sets(fz.factorize_prime(b))
