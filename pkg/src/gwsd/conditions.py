"""Conditions over variables and constants.

A condition is a tree of :class:`Atom`, :class:`And`, :class:`Or`,
:class:`Not` and :data:`TRUE`.  Conjunctions of atoms, the form used for
global conditions of g-tables and x-tables, are plain ``frozenset``\\ s of
atoms; :func:`as_condition` and :func:`flatten_conj` convert between the two.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import CompletenessError, RangeError, ValuationError
from .values import BOT, Var, fresh_constants, value_key


def _atom_key(v):
    return value_key(v)


@dataclass(frozen=True)
class Atom:
    left: object
    op: str
    right: object

    def __post_init__(self):
        if self.op not in ("=", "!="):
            raise ValueError(f"atom operator must be '=' or '!=', not {self.op!r}")
        for side in (self.left, self.right):
            if side is BOT:
                raise ValueError("the padding symbol cannot appear in conditions")
            if not isinstance(side, (str, Var)):
                raise TypeError(f"atom side {side!r} is neither constant nor variable")
        if _atom_key(self.right) < _atom_key(self.left):
            l, r = self.left, self.right
            object.__setattr__(self, "left", r)
            object.__setattr__(self, "right", l)

    @property
    def eq(self) -> bool:
        return self.op == "="

    def terms(self):
        return (self.left, self.right)

    def __repr__(self):
        return f"({self.left!r} {self.op} {self.right!r})"


def atom(left, op, right) -> Atom:
    if isinstance(left, int):
        left = str(left)
    if isinstance(right, int):
        right = str(right)
    return Atom(left, op, right)


def eq(a, b) -> Atom:
    return atom(a, "=", b)


def ne(a, b) -> Atom:
    return atom(a, "!=", b)


class _True:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "true"

    def __reduce__(self):
        return (_True, ())


TRUE = _True()


@dataclass(frozen=True)
class And:
    parts: tuple

    def __repr__(self):
        return "(" + " & ".join(map(repr, self.parts)) + ")"


@dataclass(frozen=True)
class Or:
    parts: tuple

    def __repr__(self):
        return "(" + " | ".join(map(repr, self.parts)) + ")"


@dataclass(frozen=True)
class Not:
    part: object

    def __repr__(self):
        return f"!{self.part!r}"


def atom_sort_key(a: Atom):
    return (value_key(a.left), a.op, value_key(a.right))


def as_condition(c) -> object:
    """Accept a condition or an iterable of atoms (read as a conjunction)."""
    if c is None:
        return TRUE
    if isinstance(c, (Atom, And, Or, Not, _True)):
        return c
    atoms = sorted(set(c), key=atom_sort_key)
    if not atoms:
        return TRUE
    if len(atoms) == 1:
        return atoms[0]
    return And(tuple(atoms))


def conj(*parts):
    """Build a conjunction, flattening nested ones and dropping ``TRUE``."""
    out = []
    for p in parts:
        p = as_condition(p)
        if p is TRUE:
            continue
        if isinstance(p, And):
            out.extend(p.parts)
        else:
            out.append(p)
    if not out:
        return TRUE
    if all(isinstance(p, Atom) for p in out):
        return as_condition(out)
    return out[0] if len(out) == 1 else And(tuple(out))


def flatten_conj(c):
    """The atoms of ``c`` when ``c`` is a conjunction of atoms, else ``None``."""
    c = as_condition(c)
    if c is TRUE:
        return frozenset()
    if isinstance(c, Atom):
        return frozenset([c])
    if isinstance(c, And):
        out = set()
        for p in c.parts:
            sub = flatten_conj(p)
            if sub is None:
                return None
            out |= sub
        return frozenset(out)
    return None


def variables(c) -> set:
    c = as_condition(c)
    if c is TRUE:
        return set()
    if isinstance(c, Atom):
        return {t for t in c.terms() if isinstance(t, Var)}
    if isinstance(c, Not):
        return variables(c.part)
    out = set()
    for p in c.parts:
        out |= variables(p)
    return out


def constants(c) -> set:
    c = as_condition(c)
    if c is TRUE:
        return set()
    if isinstance(c, Atom):
        return {t for t in c.terms() if isinstance(t, str)}
    if isinstance(c, Not):
        return constants(c.part)
    out = set()
    for p in c.parts:
        out |= constants(p)
    return out


def terms(c) -> set:
    return variables(c) | constants(c)


def substitute(c, mapping: Mapping):
    """Replace variables according to ``mapping`` (values or other variables)."""
    if isinstance(c, frozenset) or isinstance(c, (set, list, tuple)):
        return frozenset(substitute(a, mapping) for a in c)
    if c is TRUE:
        return c
    if isinstance(c, Atom):
        return Atom(mapping.get(c.left, c.left), c.op, mapping.get(c.right, c.right))
    if isinstance(c, Not):
        return Not(substitute(c.part, mapping))
    return type(c)(tuple(substitute(p, mapping) for p in c.parts))


def eval_condition(c, valuation: Mapping) -> bool:
    c = as_condition(c)
    if c is TRUE:
        return True
    if isinstance(c, Atom):
        l, r = c.left, c.right
        if isinstance(l, Var):
            try:
                l = valuation[l]
            except KeyError:
                raise ValuationError(f"variable {l!r} is unbound") from None
        if isinstance(r, Var):
            try:
                r = valuation[r]
            except KeyError:
                raise ValuationError(f"variable {r!r} is unbound") from None
        return (l == r) == (c.op == "=")
    if isinstance(c, And):
        return all(eval_condition(p, valuation) for p in c.parts)
    if isinstance(c, Or):
        return any(eval_condition(p, valuation) for p in c.parts)
    if isinstance(c, Not):
        return not eval_condition(c.part, valuation)
    raise TypeError(f"not a condition: {c!r}")


# -- union-find over terms ---------------------------------------------------

class _Classes:
    """Union-find over terms; each class remembers the constant it holds."""

    def __init__(self):
        self.parent = {}
        self.const = {}

    def find(self, t):
        self.parent.setdefault(t, t)
        root = t
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[t] != root:
            self.parent[t], t = root, self.parent[t]
        return root

    def add(self, t):
        r = self.find(t)
        if isinstance(t, str):
            self.const.setdefault(r, t)

    def union(self, a, b) -> bool:
        self.add(a)
        self.add(b)
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return True
        ca, cb = self.const.get(ra), self.const.get(rb)
        if ca is not None and cb is not None and ca != cb:
            return False
        self.parent[rb] = ra
        if ca is None and cb is not None:
            self.const[ra] = cb
        self.const.pop(rb, None)
        return True

    def classes(self):
        out = {}
        for t in list(self.parent):
            out.setdefault(self.find(t), []).append(t)
        return out


def _closure(atoms):
    uf = _Classes()
    for a in atoms:
        uf.add(a.left)
        uf.add(a.right)
    for a in atoms:
        if a.op == "=" and not uf.union(a.left, a.right):
            return uf, False
    for a in atoms:
        if a.op == "!=":
            ra, rb = uf.find(a.left), uf.find(a.right)
            if ra == rb:
                return uf, False
    return uf, True


def satisfiable_conjunction(atoms: Iterable[Atom], with_witness: bool = False):
    """Decide satisfiability of a conjunction of (in)equalities.

    The domain is infinite, so only equalities forced by the union-find closure
    can violate an inequality.  With ``with_witness`` a pair ``(ok, valuation)``
    is returned; free classes receive deterministic fresh constants.
    """
    atoms = list(atoms)
    uf, ok = _closure(atoms)
    if not with_witness:
        return ok
    if not ok:
        return False, None
    classes = uf.classes()
    used = {t for t in uf.parent if isinstance(t, str)}
    free = sorted((r for r in classes if uf.const.get(r) is None), key=value_key)
    fresh = dict(zip(free, fresh_constants(len(free), used)))
    valuation = {}
    for root, members in classes.items():
        val = uf.const.get(root, fresh.get(root))
        for m in members:
            if isinstance(m, Var):
                valuation[m] = val
    return True, valuation


def entails(theta: Iterable[Atom], psi) -> bool:
    """Whether the complete conjunction ``theta`` entails condition ``psi``.

    ``theta`` must decide ``=``/``!=`` between every two terms of ``psi``;
    otherwise :class:`CompletenessError` is raised.
    """
    theta = list(theta)
    uf, ok = _closure(theta)
    if not ok:
        return True
    for t in terms(psi):
        uf.add(t)
    distinct = set()
    for a in theta:
        if a.op == "!=":
            ra, rb = uf.find(a.left), uf.find(a.right)
            distinct.add((ra, rb))
            distinct.add((rb, ra))
    roots = sorted({uf.find(t) for t in terms(psi)}, key=value_key)
    for i, ra in enumerate(roots):
        for rb in roots[i + 1:]:
            both_const = uf.const.get(ra) is not None and uf.const.get(rb) is not None
            if not both_const and (ra, rb) not in distinct:
                raise CompletenessError(
                    f"conjunction does not decide whether {ra!r} and {rb!r} are equal")
    # canonical model: constant of the class, or a fresh constant per class
    used = {t for t in uf.parent if isinstance(t, str)}
    free = [r for r in roots if uf.const.get(r) is None]
    fresh = dict(zip(free, fresh_constants(len(free), used)))
    model = {}
    for t in terms(psi):
        if isinstance(t, Var):
            r = uf.find(t)
            model[t] = uf.const.get(r, fresh.get(r))
    return eval_condition(psi, model)


# -- mutex sets ----------------------------------------------------------------

@dataclass(frozen=True)
class MutexSet:
    """Variables ``Y`` with bounds ``mu``; ``cond(y, i)`` picks one alternative.

    For a variable with bound ``m`` the alternatives are ``y = 1`` ... ``y = m``
    and the conjunction ``y != 1 & ... & y != m``; a bound of 0 leaves the single
    alternative ``true``.  Every valuation satisfies exactly one alternative.
    """
    mu: Mapping = field(default_factory=dict)

    def __post_init__(self):
        for y, m in self.mu.items():
            if not isinstance(y, Var):
                raise TypeError(f"mutex variable {y!r} is not a Var")
            if m < 0:
                raise RangeError(f"mutex bound for {y!r} is negative")
        object.__setattr__(self, "mu", dict(self.mu))

    def __hash__(self):
        return hash(tuple(sorted(self.mu.items())))

    def __eq__(self, other):
        return isinstance(other, MutexSet) and self.mu == other.mu

    @property
    def variables(self):
        return list(self.mu)

    def alternatives(self, y: Var) -> int:
        return self.mu[y] + 1

    def cond(self, y: Var, i: int) -> frozenset:
        m = self.mu[y]
        if not 1 <= i <= m + 1:
            raise RangeError(f"alternative {i} out of range 1..{m + 1} for {y!r}")
        if m == 0:
            return frozenset()
        if i <= m:
            return frozenset([eq(y, str(i))])
        return frozenset(ne(y, str(l)) for l in range(1, m + 1))

    def formulas(self) -> set:
        out = {frozenset()}
        for y, m in self.mu.items():
            for i in range(1, m + 1):
                out.add(frozenset([eq(y, str(i))]))
            out.add(frozenset(ne(y, str(l)) for l in range(1, m + 1)))
        return out

    def member_formula(self, atoms: frozenset):
        """Split off the mutex formulas contained in ``atoms``.

        Returns ``(choices, rest)`` with ``choices`` mapping each mutex variable
        mentioned to its alternative index, or ``None`` when the atoms on some
        mutex variable do not form exactly one alternative.
        """
        by_var, rest = {}, set()
        for a in atoms:
            ys = [t for t in a.terms() if t in self.mu]
            if not ys:
                rest.add(a)
                continue
            y = ys[0]
            if len(ys) > 1 or not isinstance(a.right if a.left == y else a.left, str):
                return None
            by_var.setdefault(y, set()).add(a)
        choices = {}
        for y, got in by_var.items():
            for i in range(1, self.mu[y] + 2):
                if self.cond(y, i) == got:
                    choices[y] = i
                    break
            else:
                return None
        return choices, frozenset(rest)


def mutex_build(sizes, prefix: str = "x", avoid=()) -> MutexSet:
    avoid = {v.name if isinstance(v, Var) else v for v in avoid}
    mu, k = {}, 1
    for size in sizes:
        if size <= 0:
            raise RangeError(f"mutex size must be positive, got {size}")
        while f"{prefix}{k}" in avoid:
            k += 1
        mu[Var(f"{prefix}{k}")] = size
        k += 1
    return MutexSet(mu)
