"""Command line interface: ``gwsd <command> ...``.

Every command prints a report on stdout and exits with 0 when it ran; a
decision verdict is part of the report, never the exit code.  Errors exit
with 1 (bad input) or 2 (usage).
"""
from __future__ import annotations

import argparse
import json
import sys

from . import decide
from .errors import GWSDError, ParseError
from .factorize import decompose_wsd_maximal, factorize_prime
from .formats import (Document, dump, dump_relation, fmt_query, fmt_row, load,
                      parse_query, parse_row)
from .query import eval_on_world, eval_positive_on_x, is_positive
from .reductions import encode_3cnf, encode_3dnf, encode_x3c, encode_x3c_instance
from .relation import Relation
from .tables import (CMultitable, EnumBudget, GMultitable, World, rep_enumerate,
                     sorted_worlds)
from .translate import c_to_gwsd, gwsd_to_x, simplify_gwsd
from .tst import GTST, Tabset, rep_gtst, rep_tabset
from .wsd import GWSD, compose, rep_enumerate_wsd, to_tuple_level

VERDICTS = {
    "tuple-possible": ("possible", "impossible"),
    "tuple-certain": ("certain", "not certain"),
    "instance-possible": ("possible", "impossible"),
    "instance-certain": ("certain", "not certain"),
    "empty-world": ("possible", "impossible"),
    "tuple-q-poss": ("possible", "impossible"),
    "tuple-q-cert": ("certain", "not certain"),
    "inst-q-poss": ("possible", "impossible"),
    "inst-q-cert": ("certain", "not certain"),
}


class Report:
    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines: list[str] = []
        self.data: dict = {}

    def text(self, line: str):
        self.lines.append(line)

    def put(self, key, value):
        self.data[key] = value

    def emit(self, out=sys.stdout):
        if self.fmt == "json":
            json.dump(self.data, out, indent=2, sort_keys=True)
            out.write("\n")
        else:
            out.write("\n".join(self.lines).rstrip("\n") + "\n")


def _budget(args) -> EnumBudget:
    return EnumBudget(fresh=args.budget_fresh)


def _load(path) -> Document:
    return load(path)


def _as_gwsd(doc: Document) -> GWSD:
    if doc.kind == "gtst":
        # a gTST with one shared condition is a 1-gWSD
        g = doc.payload
        phi = g.common_phi()
        if phi is None:
            raise GWSDError("gtst rows carry different conditions; normalize first")
        return GWSD([Relation(g.schema, g.rows)], phi)
    if doc.kind != "gwsd":
        raise GWSDError(f"expected a gwsd document, got {doc.kind}")
    return doc.payload


def _worlds_of(doc: Document, budget) -> list:
    p = doc.payload
    if doc.kind == "gwsd":
        ws = rep_enumerate_wsd(p, budget)
    elif doc.kind in ("cmultitable", "xmultitable", "gmultitable"):
        ws = rep_enumerate(p, budget)
    elif doc.kind == "gtabset":
        ws = rep_tabset(p, budget)
    elif doc.kind == "gtst":
        ws = rep_gtst(p, budget)
    elif doc.kind == "world":
        ws = {p}
    elif doc.kind == "worlds":
        ws = set(p)
    else:
        raise GWSDError(f"{doc.kind} documents do not denote world-sets")
    return sorted_worlds(ws)


def _world_json(w: World) -> dict:
    return {n: {"schema": list(w[n].schema), "rows": [list(r) for r in w[n].rows]} for n in w}


def cmd_worlds(args, rep: Report):
    ws = _worlds_of(_load(args.file), _budget(args))
    rep.put("count", len(ws))
    rep.put("worlds", [_world_json(w) for w in ws])
    rep.text(f"{len(ws)} worlds")
    rep.text(dump(ws).rstrip() if ws else "")


def cmd_compose(args, rep: Report):
    g = compose(_as_gwsd(_load(args.file)))
    rep.put("rows", len(g.rows))
    rep.put("document", dump(g))
    rep.text(dump(g))


def cmd_translate(args, rep: Report):
    doc = _load(args.file)
    if args.direction == "gwsd-to-x":
        out = gwsd_to_x(to_tuple_level(_as_gwsd(doc)))
    else:
        if doc.kind not in ("cmultitable", "gmultitable"):
            raise GWSDError("c-to-gwsd needs a cmultitable or gmultitable document")
        t = doc.payload.to_c() if isinstance(doc.payload, GMultitable) else doc.payload
        out = c_to_gwsd(t)
        if args.simplify:
            out = simplify_gwsd(out)
    rep.put("document", dump(out))
    rep.text(dump(out))


def cmd_eval(args, rep: Report):
    q = parse_query(args.query)
    doc = _load(args.file)
    if doc.kind == "world":
        ans = eval_on_world(q, doc.payload)
        rep.put("answer", {"schema": list(ans.schema), "rows": [list(r) for r in ans.rows]})
        rep.text(dump_relation(args.name, ans))
        return
    if is_positive(q) and doc.kind in ("gwsd", "xmultitable"):
        x = gwsd_to_x(to_tuple_level(doc.payload)) if doc.kind == "gwsd" else doc.payload
        out = eval_positive_on_x(q, x, args.name)
        rep.put("document", dump(out))
        rep.text(dump(out))
        return
    answers = sorted({eval_on_world(q, w) for w in _worlds_of(doc, _budget(args))},
                     key=lambda r: (len(r), r.canonical()))
    rep.put("answers", [{"schema": list(a.schema), "rows": [list(r) for r in a.rows]}
                        for a in answers])
    rep.text(f"{len(answers)} distinct answers")
    for a in answers:
        rep.text(dump_relation(args.name, a))


def _target_relation(path) -> Relation:
    doc = _load(path)
    if doc.kind == "relation":
        return doc.payload[1]
    if doc.kind == "world" and len(doc.payload) == 1:
        return doc.payload[next(iter(doc.payload))]
    raise GWSDError("target instance must be a relation document")


def cmd_decide(args, rep: Report):
    w = _as_gwsd(_load(args.file))
    p = args.problem
    a = args.args
    need = {"tuple-possible": 2, "tuple-certain": 2, "instance-possible": 1,
            "instance-certain": 1, "empty-world": 0}.get(p, 2)
    if len(a) != need:
        raise GWSDError(f"{p} takes {need} argument(s) after the file, got {len(a)}")
    if p == "tuple-possible":
        d = decide.tuple_possible(w, a[0], parse_row(a[1]))
    elif p == "tuple-certain":
        d = decide.tuple_certain(w, a[0], parse_row(a[1]))
    elif p in ("instance-possible", "instance-certain"):
        doc = _load(a[0])
        if doc.kind != "world":
            raise GWSDError("instance must be a world document")
        fn = decide.instance_possible if p == "instance-possible" else decide.instance_certain
        d = fn(w, doc.payload)
    elif p == "empty-world":
        d = decide.empty_world_possible(w)
    else:
        q = parse_query(a[0])
        problem = p.replace("-", "_")
        target = parse_row(a[1]) if p.startswith("tuple") else _target_relation(a[1])
        d = decide.q_decide(problem, w, q, target, _budget(args))
    word = VERDICTS[p][0 if d.verdict else 1]
    rep.put("problem", p)
    rep.put("verdict", d.verdict)
    rep.put("method", d.method)
    rep.put("witness", _jsonable(d.witness))
    rep.text(f"{word} ({d.method})")
    if d.witness is not None and args.witness:
        rep.text(f"witness: {d.witness}")


def _jsonable(x):
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, World):
        return _world_json(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return repr(x)


def cmd_factorize(args, rep: Report):
    doc = _load(args.file)
    if doc.kind == "relation":
        f = factorize_prime(doc.payload[1])
        rep.put("factors", [{"schema": list(r.schema), "rows": [list(t) for t in r.rows]}
                            for r in f])
        rep.text(f"{len(f)} factors")
        for i, r in enumerate(f, 1):
            rep.text(dump_relation(f"F{i}", r).rstrip())
        return
    d = decompose_wsd_maximal(_as_gwsd(doc), args.level)
    rep.put("components", len(d.wsd.components))
    rep.put("level", d.level)
    rep.put("maximal", d.maximal)
    rep.put("document", dump(d.wsd))
    note = "" if d.maximal else ", variables frozen: possibly not maximal"
    rep.text(f"{len(d.wsd.components)} components ({d.level} level{note})")
    rep.text(dump(d.wsd))


def _split_sets(text: str) -> list:
    return [[v.strip() for v in part.split(",") if v.strip()]
            for part in text.split(";") if part.strip()]


def cmd_encode(args, rep: Report):
    if args.kind == "x3c":
        xs = [v.strip() for v in args.elements.split(",") if v.strip()]
        sets = _split_sets(args.sets)
        e = (encode_x3c_instance if args.instance else encode_x3c)(xs, sets)
    else:
        clauses = [[int(v) for v in c] for c in _split_sets(args.clauses)]
        e = (encode_3cnf if args.kind == "3cnf" else encode_3dnf)(clauses)
    rep.put("problem", e.problem)
    rep.put("document", dump(e.wsd))
    rep.text(f"# decide with: {e.problem}")
    if e.query is not None:
        rep.put("query", fmt_query(e.query))
        rep.put("target", list(e.target))
        rep.text(f"# query: {fmt_query(e.query)}")
        rep.text(f"# target: {fmt_row(e.target)}")
    rep.text(dump(e.wsd))
    if e.instance is not None:
        rep.put("instance", dump(e.instance))
        rep.text(dump(e.instance))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gwsd", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget-fresh", type=int, default=None, metavar="K",
                        help="fresh constants in the enumeration pool "
                             "(default: one per variable)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("worlds", parents=[common], help="list the represented worlds")
    s.add_argument("file")
    s.set_defaults(fn=cmd_worlds)

    s = sub.add_parser("compose", parents=[common], help="product of the WSD components")
    s.add_argument("file")
    s.set_defaults(fn=cmd_compose)

    s = sub.add_parser("translate", parents=[common], help="translate between systems")
    s.add_argument("direction", choices=("gwsd-to-x", "c-to-gwsd"))
    s.add_argument("file")
    s.add_argument("--simplify", action="store_true", help="shrink the resulting 1-gWSD")
    s.set_defaults(fn=cmd_translate)

    s = sub.add_parser("eval", parents=[common], help="evaluate a query")
    s.add_argument("query")
    s.add_argument("file")
    s.add_argument("--name", default="Q", help="answer relation name")
    s.set_defaults(fn=cmd_eval)

    s = sub.add_parser("decide", parents=[common], help="decision problems on a gWSD")
    s.add_argument("problem", choices=sorted(VERDICTS))
    s.add_argument("file")
    s.add_argument("args", nargs="*")
    s.add_argument("--witness", action="store_true", help="print the witness")
    s.set_defaults(fn=cmd_decide)

    s = sub.add_parser("factorize", parents=[common], help="prime factorization")
    s.add_argument("file")
    s.add_argument("--level", choices=("auto", "tuple", "attribute"), default="auto")
    s.set_defaults(fn=cmd_factorize)

    s = sub.add_parser("encode", parents=[common], help="reduction instance generators")
    s.add_argument("kind", choices=("x3c", "3cnf", "3dnf"))
    s.add_argument("--elements", default="", help="x3c: comma separated elements")
    s.add_argument("--sets", default="", help="x3c: sets like '1,5,9;2,5,8'")
    s.add_argument("--instance", action="store_true",
                   help="x3c: instance-possibility encoding instead of the empty world")
    s.add_argument("--clauses", default="", help="3cnf/3dnf: literals like '1,2,3;-1,2,-4'")
    s.set_defaults(fn=cmd_encode)
    return p


def run(argv=None, out=sys.stdout, err=sys.stderr) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    rep = Report(args.format)
    try:
        args.fn(args, rep)
    except ParseError as e:
        err.write(f"gwsd: parse error: {e}\n")
        return 1
    except (GWSDError, OSError, ValueError, KeyError) as e:
        err.write(f"gwsd: {e}\n")
        return 1
    rep.emit(out)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
