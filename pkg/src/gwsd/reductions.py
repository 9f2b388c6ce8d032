"""Instance generators for the hardness reductions (exact cover by 3-sets,
3CNF satisfiability, 3DNF tautology).

Each generator returns an :class:`Encoding` bundling the WSD with whatever
companion query, target or instance the decision problem needs.  ``labels``
maps each component row back to the input object it encodes, since rows are
stored in canonical order rather than construction order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

from .errors import InstanceError
from .query import Base, Query, project, rename, select, true_literal
from .relation import Ref, Relation
from .tables import World
from .values import BOT, natural_key
from .wsd import GWSD


@dataclass(frozen=True)
class Encoding:
    kind: str
    wsd: GWSD
    problem: str
    query: Query | None = None
    target: Any = None
    instance: World | None = None
    labels: tuple = field(default=(), compare=False)

    def label_of(self, k: int, row) -> Any:
        return dict(self.labels[k])[tuple(row)]


def _x3c_check(X, C):
    X = sorted({str(x) for x in X}, key=natural_key)
    if not X or len(X) % 3:
        raise InstanceError(f"|X| must be a positive multiple of 3, got {len(X)}")
    sets = []
    for s in C:
        s = [str(v) for v in s]
        if len(s) != 3 or len(set(s)) != 3:
            raise InstanceError(f"{s} is not a 3-element set")
        if not set(s) <= set(X):
            raise InstanceError(f"{s} is not a subset of X")
        sets.append(s)
    if not sets:
        raise InstanceError("C is empty")
    return X, sets


def encode_x3c(X, C) -> Encoding:
    """Attribute-level WSD whose rep contains the empty world iff C has an
    exact cover of X.  Element x_j marks its slot with BOT."""
    X, sets = _x3c_check(X, C)
    pos = {x: j for j, x in enumerate(X, 1)}
    q = len(X) // 3
    comps, labels = [], []
    for i in range(1, q + 1):
        schema = tuple(f"R.d{j}.A{i}" for j in range(1, len(X) + 1))
        rows, lab = [], []
        for n, s in enumerate(sets, 1):
            hit = {pos[x] for x in s}
            row = tuple(BOT if j in hit else "1" for j in range(1, len(X) + 1))
            rows.append(row)
            lab.append((row, n))
        comps.append(Relation(schema, rows))
        labels.append(tuple(lab))
    return Encoding("x3c", GWSD(comps), "empty_world", labels=tuple(labels))


def encode_x3c_instance(X, C) -> Encoding:
    """Tuple-level WSD over R(A) with I_X possible iff C has an exact cover."""
    X, sets = _x3c_check(X, C)
    q = len(X) // 3
    comps, labels = [], []
    for i in range(1, q + 1):
        j = 3 * (i - 1)
        schema = tuple(f"R.d{j + k}.A" for k in (1, 2, 3))
        rows = [tuple(s) for s in sets]
        comps.append(Relation(schema, rows))
        labels.append(tuple((tuple(s), n) for n, s in enumerate(sets, 1)))
    inst = World({"R": Relation(("A",), [(x,) for x in X])})
    return Encoding("x3c-instance", GWSD(comps), "instance_possible",
                    instance=inst, labels=tuple(labels))


def _clauses(clauses) -> list:
    out = []
    for c in clauses:
        c = [int(l) for l in c]
        if len(c) != 3 or any(l == 0 for l in c):
            raise InstanceError(f"clause {c} must have exactly 3 non-zero literals")
        out.append(c)
    if not out:
        raise InstanceError("no clauses")
    return out


def _literal_components(clauses, cells):
    """Components C_j with a true row and a false row; ``cells(i, k)`` gives
    the attribute suffixes and values of literal (i, k)."""
    by_var: dict[int, list] = {}
    for i, c in enumerate(clauses, 1):
        for k, lit in enumerate(c, 1):
            by_var.setdefault(abs(lit), []).append((i, k, lit > 0))
    comps, labels = [], []
    for j in sorted(by_var):
        schema, t_row, f_row = [], [], []
        for i, k, pos in by_var[j]:
            for attr, val in cells(i, k):
                schema.append(attr)
                t_row.append(val if pos else BOT)
                f_row.append(BOT if pos else val)
        t_row, f_row = tuple(t_row), tuple(f_row)
        comps.append(Relation(tuple(schema), [t_row, f_row]))
        labels.append(((t_row, (j, True)), (f_row, (j, False))))
    return comps, labels


def cnf3_query() -> Query:
    return true_literal() - project(Base("S") - Base("R"))


def encode_3cnf(clauses: Sequence[Sequence[int]]) -> Encoding:
    """Clauses are triples of non-zero ints, -j meaning the negation of x_j."""
    clauses = _clauses(clauses)
    comps, labels = _literal_components(
        clauses, lambda i, k: [(f"R.d{i}_{k}.C", str(i))])
    n = len(clauses)
    cs = Relation(tuple(f"S.d{i}.C" for i in range(1, n + 1)),
                  [tuple(str(i) for i in range(1, n + 1))])
    comps.append(cs)
    labels.append(((cs.rows[0], "S"),))
    return Encoding("3cnf", GWSD(comps), "tuple_q_poss", cnf3_query(), ("true",),
                    labels=tuple(labels))


def dnf3_query() -> Query:
    parts = [rename(Base("R"), {"C": f"r{n}.C", "P": f"r{n}.P"}) for n in (1, 2, 3)]
    prod = parts[0] * parts[1] * parts[2]
    sel = select(prod, ("r1.C", "=", Ref("r2.C")), ("r1.C", "=", Ref("r3.C")),
                 ("r1.P", "=", "1"), ("r2.P", "=", "2"), ("r3.P", "=", "3"))
    return project(sel)


def encode_3dnf(clauses: Sequence[Sequence[int]]) -> Encoding:
    clauses = _clauses(clauses)
    comps, labels = _literal_components(
        clauses, lambda i, k: [(f"R.d{i}_{k}.C", str(i)), (f"R.d{i}_{k}.P", str(k))])
    return Encoding("3dnf", GWSD(comps), "tuple_q_cert", dnf3_query(), ("true",),
                    labels=tuple(labels))


KINDS = {"x3c": encode_x3c, "x3c-instance": encode_x3c_instance,
         "3cnf": encode_3cnf, "cnf3": encode_3cnf, "3dnf": encode_3dnf, "dnf3": encode_3dnf}


def encode_reduction(kind: str, *instance) -> Encoding:
    try:
        fn = KINDS[kind]
    except KeyError:
        raise InstanceError(f"unknown reduction {kind!r}") from None
    return fn(*instance)
