"""Text formats for relations, worlds, multitables, tabsets, gTSTs and WSDs,
plus the query and condition grammars.

Documents are block structured::

    # comments run to end of line
    gwsd {
      where { ?x != 1 & ?x != ?y }
      component (R.d1.A, R.d1.B) { (?x, ?y) (1, _|_) }
    }

Constants are bare words, numbers or double-quoted strings; ``?name`` is a
variable and ``_|_`` the padding symbol.  ``parse`` returns a
:class:`Document`, ``dump`` prints one canonically.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any

from .conditions import (TRUE, And, Atom, MutexSet, Not, Or, _True, atom,
                         atom_sort_key, flatten_conj)
from .errors import ParseError, SchemaError
from .query import (Base, Difference, Literal, Product, Project, Query, Rename,
                    Select, Union, true_literal)
from .relation import Ref, Relation
from .tables import CMultitable, CTable, GMultitable, Table, World, XMultitable
from .tst import GTST, Layout, Tabset
from .values import BOT, Var, row_key, value_key
from .wsd import GWSD

KINDS = ("relation", "world", "worlds", "cmultitable", "xmultitable", "gmultitable",
         "gtabset", "gtst", "gwsd")

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<bot>_\|_)
  | (?P<var>\?[A-Za-z0-9_.~]+)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<op>!=|->|[(){}\[\],:&|!=*+\-])
  | (?P<name>[A-Za-z0-9_.~]+)
""", re.VERBOSE)

_BARE = re.compile(r"[A-Za-z0-9_.~]+")
_KEYWORDS = {"true", "if", "where", "relation", "component", "mutex", "world",
             "worlds", "select", "project", "rename"} | set(KINDS)


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    out, line, start, pos = [], 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind != "ws":
            out.append(Tok(kind, m.group(), line, m.start() - start + 1))
        pos = m.end()
    out.append(Tok("eof", "", line, pos - start + 1))
    return out


def _check_brackets(toks):
    pairs = {")": "(", "}": "{", "]": "["}
    stack = []
    for t in toks:
        if t.kind != "op":
            continue
        if t.text in "({[":
            stack.append(t)
        elif t.text in pairs:
            if not stack or stack[-1].text != pairs[t.text]:
                raise ParseError(f"unbalanced {t.text!r}", t.line, t.col)
            stack.pop()
    if stack:
        t = stack[-1] if stack[-1].text != "(" else next(
            (s for s in reversed(stack) if s.text == "{"), stack[-1])
        raise ParseError(f"unclosed {t.text!r}", t.line, t.col)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        _check_brackets(self.toks)
        self.i = 0

    # token helpers
    def peek(self, k: int = 0) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Tok:
        t = self.peek()
        self.i += 1
        return t

    def error(self, msg: str, tok: Tok | None = None):
        tok = tok or self.peek()
        found = tok.text or "end of input"
        raise ParseError(f"{msg}, found {found!r}", tok.line, tok.col)

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.text == text and t.kind in ("op", "name")

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.next()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def name(self) -> str:
        t = self.peek()
        if t.kind == "name":
            return self.next().text
        if t.kind == "str":
            return json.loads(self.next().text)
        self.error("expected a name")

    # values and rows
    def value(self):
        t = self.next()
        if t.kind == "var":
            return Var(t.text[1:])
        if t.kind == "bot":
            return BOT
        if t.kind == "str":
            return json.loads(t.text)
        if t.kind == "name":
            return t.text
        self.error("expected a value", t)

    def term(self):
        v = self.value()
        if v is BOT:
            self.error("the padding symbol cannot appear in conditions", self.toks[self.i - 1])
        return v

    def names_list(self) -> list:
        self.expect("(")
        out = []
        if not self.at(")"):
            out.append(self.name())
            while self.accept(","):
                out.append(self.name())
        self.expect(")")
        return out

    def row(self) -> tuple:
        self.expect("(")
        out = []
        if not self.at(")"):
            out.append(self.value())
            while self.accept(","):
                out.append(self.value())
        self.expect(")")
        return tuple(out)

    def block_rows(self, width: int, with_cond: bool = False):
        open_tok = self.expect("{")
        rows, conds = [], []
        while not self.at("}"):
            if self.peek().kind == "eof":
                self.error("unclosed '{'", open_tok)
            tok = self.peek()
            r = self.row()
            if len(r) != width:
                raise ParseError(f"row has {len(r)} values, schema has {width}",
                                 tok.line, tok.col)
            rows.append(r)
            if with_cond:
                conds.append(self.condition() if self.accept("if") else TRUE)
        self.next()
        return (rows, conds) if with_cond else rows

    # conditions
    def condition(self):
        parts = [self.cond_and()]
        while self.accept("|"):
            parts.append(self.cond_and())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def cond_and(self):
        parts = [self.cond_unary()]
        while self.accept("&"):
            parts.append(self.cond_unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def cond_unary(self):
        if self.accept("!"):
            return Not(self.cond_unary())
        if self.accept("("):
            c = self.condition()
            self.expect(")")
            return c
        t = self.peek()
        if t.kind == "name" and t.text == "true" and self.peek(1).text not in ("=", "!="):
            self.next()
            return TRUE
        left = self.term()
        op = self.next()
        if op.text not in ("=", "!="):
            self.error("expected '=' or '!='", op)
        return atom(left, op.text, self.term())

    def conjunction(self, tok: Tok) -> frozenset:
        c = self.condition()
        atoms = flatten_conj(c)
        if atoms is None:
            raise ParseError("expected a conjunction of (in)equalities", tok.line, tok.col)
        return atoms

    def where_block(self, conj_only: bool):
        self.expect("where")
        tok = self.expect("{")
        if self.at("}"):
            self.next()
            return frozenset() if conj_only else TRUE
        c = self.conjunction(tok) if conj_only else self.condition()
        self.expect("}")
        return c

    # documents
    def relation(self):
        self.expect("relation")
        name = self.name()
        schema = self.names_list()
        rows = self.block_rows(len(schema))
        return name, Relation(schema, rows)

    def world(self):
        self.expect("world")
        self.expect("{")
        rels = {}
        while self.at("relation"):
            n, r = self.relation()
            rels[n] = r
        self.expect("}")
        try:
            return World(rels)
        except SchemaError as e:
            self.error(str(e))

    def worlds(self):
        self.expect("worlds")
        self.expect("{")
        out = []
        while self.at("world"):
            out.append(self.world())
        self.expect("}")
        return out

    def _multitable_body(self, kind):
        self.expect(kind)
        self.expect("{")
        mutex = {}
        if kind == "xmultitable" and self.accept("mutex"):
            self.expect("{")
            while not self.at("}"):
                t = self.next()
                if t.kind != "var":
                    self.error("expected a mutex variable", t)
                self.expect(":")
                n = self.next()
                if n.kind != "name" or not n.text.isdigit():
                    self.error("expected a mutex bound", n)
                mutex[Var(t.text[1:])] = int(n.text)
                self.accept(",")
            self.next()
        glob = self.where_block(kind == "gmultitable") if self.at("where") else None
        tables = {}
        while self.at("relation"):
            self.next()
            name = self.name()
            schema = self.names_list()
            if kind == "gmultitable":
                tables[name] = Table(tuple(schema), self.block_rows(len(schema)))
            else:
                rows, conds = self.block_rows(len(schema), with_cond=True)
                tables[name] = CTable(tuple(schema), rows, conds)
        self.expect("}")
        if kind == "gmultitable":
            return GMultitable(tables, glob or frozenset())
        if kind == "xmultitable":
            return XMultitable(tables, glob if glob is not None else TRUE, MutexSet(mutex))
        return CMultitable(tables, glob if glob is not None else TRUE)

    def gtabset(self):
        self.expect("gtabset")
        self.expect("{")
        members = []
        while self.at("gmultitable"):
            members.append(self._multitable_body("gmultitable"))
        self.expect("}")
        return Tabset(tuple(members))

    def gtst(self):
        self.expect("gtst")
        schema = self.names_list()
        tok = self.expect("{")
        rows, conds = [], []
        while not self.at("}"):
            if self.peek().kind == "eof":
                self.error("unclosed '{'", tok)
            t = self.peek()
            r = self.row()
            if len(r) != len(schema):
                raise ParseError(f"row has {len(r)} values, schema has {len(schema)}",
                                 t.line, t.col)
            rows.append(r)
            conds.append(self.where_block(True) if self.at("where") else frozenset())
        self.next()
        return GTST(Layout.from_schema(schema), rows, conds)

    def gwsd(self):
        self.expect("gwsd")
        self.expect("{")
        glob = self.where_block(True) if self.at("where") else frozenset()
        comps = []
        while self.at("component"):
            self.next()
            schema = self.names_list()
            comps.append(Relation(schema, self.block_rows(len(schema))))
        self.expect("}")
        return GWSD(comps, glob)

    def document(self):
        t = self.peek()
        if t.kind != "name" or t.text not in KINDS:
            self.error(f"expected one of {', '.join(KINDS)}")
        try:
            if t.text == "relation":
                name, rel = self.relation()
                payload: Any = (name, rel)
            elif t.text in ("cmultitable", "xmultitable", "gmultitable"):
                payload = self._multitable_body(t.text)
            else:
                payload = getattr(self, t.text)()
        except (SchemaError, ValueError, TypeError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(str(e), t.line, t.col) from None
        if self.peek().kind != "eof":
            self.error("trailing input after document")
        return Document(t.text, payload)


@dataclass(frozen=True)
class Document:
    kind: str
    payload: Any


def parse(text: str) -> Document:
    return _Parser(text).document()


def parse_condition(text: str):
    p = _Parser(text)
    c = p.condition()
    if p.peek().kind != "eof":
        p.error("trailing input after condition")
    return c


def parse_row(text: str) -> tuple:
    p = _Parser(text)
    r = p.row()
    if p.peek().kind != "eof":
        p.error("trailing input after tuple")
    return r


# -- printing --------------------------------------------------------------------

def fmt_value(v) -> str:
    if v is BOT:
        return "_|_"
    if isinstance(v, Var):
        return "?" + v.name
    if _BARE.fullmatch(v) and v not in _KEYWORDS:
        return v
    return json.dumps(v)


def fmt_name(n: str) -> str:
    return n if _BARE.fullmatch(n) and n not in _KEYWORDS else json.dumps(n)


def fmt_row(r) -> str:
    return "(" + ", ".join(fmt_value(v) for v in r) + ")"


def fmt_schema(s) -> str:
    return "(" + ", ".join(fmt_name(a) for a in s) + ")"


def fmt_condition(c, top: bool = True) -> str:
    if isinstance(c, _True):
        return "true"
    if isinstance(c, Atom):
        return f"{fmt_value(c.left)} {c.op} {fmt_value(c.right)}"
    if isinstance(c, (frozenset, set)):
        if not c:
            return "true"
        return fmt_condition(And(tuple(sorted(c, key=atom_sort_key))), top)
    if isinstance(c, Not):
        return "!" + fmt_condition(c.part, False)
    if isinstance(c, And):
        s = " & ".join(fmt_condition(p, False) for p in c.parts)
    elif isinstance(c, Or):
        s = " | ".join(fmt_condition(p, False) for p in c.parts)
    else:
        raise TypeError(f"not a condition: {c!r}")
    return s if top or len(c.parts) == 1 else f"({s})"


def _where(c, indent: str) -> list:
    text = fmt_condition(c)
    return [] if text == "true" else [f"{indent}where {{ {text} }}"]


def _rows_block(rows, indent: str) -> str:
    if not rows:
        return "{ }"
    return "{\n" + "".join(f"{indent}  {fmt_row(r)}\n" for r in rows) + indent + "}"


def _sorted_rows(rel: Relation):
    return sorted(rel.rows, key=row_key)


def dump_relation(name: str, rel: Relation, indent: str = "") -> str:
    return f"{indent}relation {fmt_name(name)} {fmt_schema(rel.schema)} " + \
        _rows_block(_sorted_rows(rel), indent)


def _dump_world(w: World, indent: str = "") -> str:
    lines = [f"{indent}world {{"]
    lines += [dump_relation(n, w[n], indent + "  ") for n in w]
    lines.append(indent + "}")
    return "\n".join(lines)


def _dump_ctables(t, indent: str, gtable: bool) -> list:
    lines = []
    for n in sorted(t.tables):
        tab = t.tables[n]
        head = f"{indent}relation {fmt_name(n)} {fmt_schema(tab.schema)} "
        if gtable:
            lines.append(head + _rows_block(tab.rows, indent))
            continue
        if not tab.rows:
            lines.append(head + "{ }")
            continue
        body = []
        for r, c in zip(tab.rows, tab.conds):
            cs = fmt_condition(c)
            body.append(f"{indent}  {fmt_row(r)}" + ("" if cs == "true" else f" if {cs}"))
        lines.append(head + "{\n" + "\n".join(body) + f"\n{indent}}}")
    return lines


def _dump_multitable(kind: str, t, indent: str = "") -> str:
    lines = [f"{indent}{kind} {{"]
    inner = indent + "  "
    if kind == "xmultitable" and t.mutex.mu:
        items = ", ".join(f"{fmt_value(y)}: {m}" for y, m in
                          sorted(t.mutex.mu.items(), key=lambda kv: value_key(kv[0])))
        lines.append(f"{inner}mutex {{ {items} }}")
    lines += _where(t.global_, inner)
    lines += _dump_ctables(t, inner, kind == "gmultitable")
    lines.append(indent + "}")
    return "\n".join(lines)


def _dump_gtst(g: GTST) -> str:
    lines = [f"gtst {fmt_schema(g.schema)} {{"]
    for r, c in zip(g.rows, g.conds):
        cs = fmt_condition(c)
        lines.append(f"  {fmt_row(r)}" + ("" if cs == "true" else f" where {{ {cs} }}"))
    lines.append("}")
    return "\n".join(lines)


def _dump_gwsd(w: GWSD) -> str:
    lines = ["gwsd {"]
    lines += _where(w.global_, "  ")
    for c in w.components:
        lines.append(f"  component {fmt_schema(c.schema)} " + _rows_block(_sorted_rows(c), "  "))
    lines.append("}")
    return "\n".join(lines)


def dump(doc) -> str:
    """Canonical text of a document or of a bare payload object."""
    if not isinstance(doc, Document):
        doc = as_document(doc)
    k, p = doc.kind, doc.payload
    if k == "relation":
        out = dump_relation(*p)
    elif k == "world":
        out = _dump_world(p)
    elif k == "worlds":
        out = "worlds {\n" + "\n".join(_dump_world(w, "  ") for w in p) + "\n}"
    elif k in ("cmultitable", "xmultitable", "gmultitable"):
        out = _dump_multitable(k, p)
    elif k == "gtabset":
        out = "gtabset {\n" + "\n".join(_dump_multitable("gmultitable", m, "  ")
                                         for m in p) + "\n}"
    elif k == "gtst":
        out = _dump_gtst(p)
    elif k == "gwsd":
        out = _dump_gwsd(p)
    else:
        raise ValueError(f"unknown document kind {k!r}")
    return out + "\n"


def as_document(obj) -> Document:
    if isinstance(obj, GWSD):
        return Document("gwsd", obj)
    if isinstance(obj, XMultitable):
        return Document("xmultitable", obj)
    if isinstance(obj, CMultitable):
        return Document("cmultitable", obj)
    if isinstance(obj, GMultitable):
        return Document("gmultitable", obj)
    if isinstance(obj, Tabset):
        return Document("gtabset", obj)
    if isinstance(obj, GTST):
        return Document("gtst", obj)
    if isinstance(obj, World):
        return Document("world", obj)
    if isinstance(obj, (list, tuple)) and all(isinstance(w, World) for w in obj):
        return Document("worlds", list(obj))
    raise TypeError(f"cannot print {type(obj).__name__}")


def load(path) -> Document:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


# -- queries -----------------------------------------------------------------------

class _QueryParser(_Parser):
    def query(self) -> Query:
        q = self.q_term()
        while self.at("+") or self.at("-"):
            op = self.next().text
            r = self.q_term()
            q = Union(q, r) if op == "+" else Difference(q, r)
        return q

    def q_term(self) -> Query:
        q = self.q_factor()
        while self.accept("*"):
            q = Product(q, self.q_factor())
        return q

    def q_factor(self) -> Query:
        t = self.peek()
        if self.accept("("):
            q = self.query()
            self.expect(")")
            return q
        if self.accept("{"):
            self.expect("true")
            self.expect("}")
            return true_literal()
        if t.kind == "name" and t.text in ("select", "project", "rename") and \
                self.peek(1).text == "[":
            self.next()
            self.expect("[")
            if t.text == "select":
                conds = [self.sel_cond()]
                while self.accept(",") or self.accept("&"):
                    conds.append(self.sel_cond())
                arg = self._close()
                return Select(arg, tuple(conds))
            if t.text == "project":
                attrs = []
                if not self.at("]"):
                    attrs.append(self.name())
                    while self.accept(","):
                        attrs.append(self.name())
                return Project(self._close(), tuple(attrs))
            pairs = [self.rename_pair()]
            while self.accept(","):
                pairs.append(self.rename_pair())
            return Rename(self._close(), tuple(pairs))
        if t.kind in ("name", "str"):
            return Base(self.name())
        self.error("expected a query")

    def _close(self) -> Query:
        self.expect("]")
        self.expect("(")
        q = self.query()
        self.expect(")")
        return q

    def sel_cond(self):
        a = self.name()
        op = self.next()
        if op.text not in ("=", "!="):
            self.error("expected '=' or '!='", op)
        t = self.next()
        if t.kind == "str":
            rhs = json.loads(t.text)
        elif t.kind == "name" and re.fullmatch(r"[0-9]+(\.[0-9]+)?", t.text):
            rhs = t.text
        elif t.kind == "name":
            rhs = Ref(t.text)
        else:
            self.error("expected an attribute or a constant", t)
        return (a, op.text, rhs)

    def rename_pair(self):
        a = self.name()
        self.expect("->")
        return (a, self.name())


def parse_query(text: str) -> Query:
    p = _QueryParser(text)
    q = p.query()
    if p.peek().kind != "eof":
        p.error("trailing input after query")
    return q


def fmt_query(q: Query) -> str:
    if isinstance(q, Base):
        return fmt_name(q.name)
    if isinstance(q, Literal):
        return "{true}"
    if isinstance(q, Select):
        parts = []
        for a, op, r in q.conds:
            if isinstance(r, Ref):
                rs = fmt_name(r.name)
            elif re.fullmatch(r"[0-9]+(\.[0-9]+)?", r):
                rs = r
            else:
                rs = json.dumps(r)
            parts.append(f"{fmt_name(a)}{op}{rs}")
        return f"select[{', '.join(parts)}]({fmt_query(q.child)})"
    if isinstance(q, Project):
        return f"project[{', '.join(map(fmt_name, q.attrs))}]({fmt_query(q.child)})"
    if isinstance(q, Rename):
        m = ", ".join(f"{fmt_name(a)}->{fmt_name(b)}" for a, b in q.mapping)
        return f"rename[{m}]({fmt_query(q.child)})"
    op = {Product: " * ", Union: " + ", Difference: " - "}[type(q)]
    return f"({fmt_query(q.left)}{op}{fmt_query(q.right)})"
