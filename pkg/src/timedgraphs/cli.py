"""Command-line interface.

Exit codes: 0 success / positive verdict, 1 negative verdict, 2 internal
disagreement between methods, 64 usage or input errors, 74 I/O errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import analysis
from .formulas.realizability import gen_closed_realizability, gen_mixed_realizability
from .formulas.system import (
    SpecError, gen_emptiness_formula, gen_modelcheck_formula, gen_system_formula,
)
from .graphs import GraphError, WeightedGraph, parse_graph, to_doc, to_dot, validate
from .pdl import ast as A
from .pdl.engine import ResourceLimit, UndeclaredSymbol
from .pdl.semantics import eval_eq, eval_path, eval_state
from .pdl.sexpr import SExprError, parse_path, parse_sentence, parse_state, to_sexpr
from .realizability import (
    check_realizable, check_tsm_certificate, realization_from_certificate, search_certificate,
)
from .timed.instructions import InstructionError
from .timed.system import SystemSpecError, parse_system

EX_OK, EX_NO, EX_INTERNAL, EX_USAGE, EX_IOERR = 0, 1, 2, 64, 74


class UsageError(Exception):
    pass


class Disagreement(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EX_USAGE)


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def _num(x) -> str:
    return str(Fraction(x))


def _emit(args, doc: dict, text: str) -> None:
    if args.json:
        print(json.dumps(doc, sort_keys=True))
    else:
        print(text)


def _max_candidates():
    v = os.environ.get("TIMEDGRAPHS_MAX_CANDIDATES")
    return int(v) if v else None


# ---------------------------------------------------------------- realizable

def _load_weighted(path, M):
    g = parse_graph(_read(path))
    if not isinstance(g, WeightedGraph):
        raise UsageError(f"{path} is not a weighted graph")
    if M is not None:
        g = WeightedGraph(g.node_count, M, g.order_edges, g.constraint_edges)
        problems = validate(g)
        if problems:
            raise UsageError("; ".join(map(str, problems)))
    return g


def cmd_realizable(args) -> int:
    g = _load_weighted(args.graph, args.M)
    direct = check_realizable(g)
    doc = {"M": g.M, "method": args.method, "realizable": direct.realizable}
    if args.method in ("tsm", "formula") and not g.is_linear():
        raise UsageError(f"--method {args.method} needs a linear graph")
    if args.method == "tsm":
        cert = search_certificate(g, _max_candidates())
        if (cert is not None) != direct.realizable:
            raise Disagreement("certificate search and shortest paths disagree")
        if cert is not None:
            if not check_tsm_certificate(g, cert):
                raise Disagreement("returned certificate does not check")
            doc["certificate"] = list(cert)
            doc["ts"] = [_num(t) for t in realization_from_certificate(g, cert)]
    elif args.method == "formula":
        ok, wit = eval_eq(g, gen_mixed_realizability(g.M))
        if ok != direct.realizable:
            raise Disagreement("realizability formula and shortest paths disagree")
        if ok:
            doc["residues"] = {p: sorted(nodes) for p, nodes in sorted(wit.items())}
    if direct.realizable and "ts" not in doc:
        doc["ts"] = [_num(t) for t in direct.ts]
    if not direct.realizable:
        doc["cycle"] = direct.cycle.to_doc()
    if not args.witness:
        doc.pop("ts", None)
    if args.dot:
        _write(args.dot, to_dot(g))
    if direct.realizable:
        text = f"realizable (M={g.M})"
        if "ts" in doc:
            text += "\nts = " + " ".join(doc["ts"])
    else:
        text = (f"not realizable (M={g.M}): cycle through nodes {list(direct.cycle.nodes)} "
                f"of weight {direct.cycle.weight}{' with a strict edge' if direct.cycle.strict else ''}")
    _emit(args, doc, text)
    return EX_OK if direct.realizable else EX_NO


# ---------------------------------------------------------------- eval

def _parse_any(text):
    errors = []
    for parse in (parse_sentence, parse_state, parse_path):
        try:
            return parse(text)
        except SExprError as exc:
            errors.append(exc)
    raise errors[0]


def cmd_eval(args) -> int:
    g = parse_graph(_read(args.graph))
    f = _parse_any(_read(args.formula))
    if isinstance(g, WeightedGraph):
        g = g.to_labeled()
    if isinstance(f, A.STATE_TYPES):
        nodes = sorted(eval_state(g, f))
        _emit(args, {"kind": "state", "nodes": nodes}, " ".join(map(str, nodes)))
        return EX_OK if nodes else EX_NO
    if isinstance(f, A.PATH_TYPES):
        pairs = sorted(eval_path(g, f))
        _emit(args, {"kind": "path", "pairs": [list(p) for p in pairs]},
              "\n".join(f"{u} {v}" for u, v in pairs))
        return EX_OK if pairs else EX_NO
    ok, wit = eval_eq(g, f)
    doc = {"kind": "sentence", "value": ok}
    text = "true" if ok else "false"
    if ok and wit:
        doc["witness"] = {p: sorted(nodes) for p, nodes in sorted(wit.items())}
        text += "\n" + "\n".join(f"{p}: {sorted(nodes)}" for p, nodes in sorted(wit.items()))
    _emit(args, doc, text)
    return EX_OK if ok else EX_NO


# ---------------------------------------------------------------- gen-formula

def _system(path):
    return parse_system(_read(path))


def cmd_gen_formula(args) -> int:
    kind = args.kind
    if kind in ("closed-realizability", "mixed-realizability"):
        if args.M is None:
            raise UsageError(f"{kind} needs --M")
        f = (gen_closed_realizability if kind.startswith("closed") else gen_mixed_realizability)(args.M)
    else:
        if not args.system:
            raise UsageError(f"{kind} needs --system")
        T = _system(args.system)
        if kind == "system":
            f = gen_system_formula(T)
        elif kind == "emptiness":
            f = gen_emptiness_formula(T)
        else:
            if not args.spec:
                raise UsageError("modelcheck needs --spec")
            f = gen_modelcheck_formula(T, parse_sentence(_read(args.spec)))
    if args.stats:
        sys.stderr.write(json.dumps({"size": A.formula_size(f), "tree_size": A.formula_size(f, shared=False),
                                     "intersection_width": A.intersection_width(f)}, sort_keys=True) + "\n")
    print(to_sexpr(f))
    return EX_OK


# ---------------------------------------------------------------- systems

def _witness_outputs(args, verdict):
    if verdict.found and args.out:
        _write(args.out, json.dumps({**verdict.to_doc(), "graph": to_doc(verdict.graph)}, sort_keys=True) + "\n")
    if verdict.found and args.dot:
        _write(args.dot, to_dot(verdict.graph))


def cmd_empty(args) -> int:
    T = _system(args.system)
    v = analysis.check_emptiness_bounded(T, args.bound)
    _witness_outputs(args, v)
    if v.found:
        text = (f"feasible run of length {len(v.run)} found (bound {args.bound}, M={T.M})\n"
                + "\n".join(f"{i}: {{{', '.join(sorted(l))}}} @ {_num(t)}"
                            for i, (l, t) in enumerate(zip(v.run.labels, v.ts))))
    else:
        text = f"empty up to length {args.bound} ({v.checked} runs checked, M={T.M})"
    _emit(args, {**v.to_doc(), "M": T.M, "empty_up_to_bound": not v.found}, text)
    return EX_OK if v.found else EX_NO


def cmd_modelcheck(args) -> int:
    T = _system(args.system)
    spec = parse_sentence(_read(args.spec))
    v = analysis.model_check_bounded(T, spec, args.bound)
    _witness_outputs(args, v)
    if v.found:
        text = (f"violation by a feasible run of length {len(v.run)} (bound {args.bound}, M={T.M})\n"
                + "\n".join(f"{i}: {{{', '.join(sorted(l))}}} @ {_num(t)}"
                            for i, (l, t) in enumerate(zip(v.run.labels, v.ts))))
    else:
        text = f"no violation up to length {args.bound} ({v.checked} runs checked, M={T.M})"
    _emit(args, {**v.to_doc(), "M": T.M, "violated": v.found}, text)
    return EX_NO if v.found else EX_OK


def cmd_crossval(args) -> int:
    T = _system(args.system)
    name = os.path.splitext(os.path.basename(args.system))[0]
    report = analysis.cross_validate(T, args.bound, name, mutants=not args.no_mutants)
    lines = [json.dumps(r, sort_keys=True) for r in report.records]
    if args.out:
        _write(args.out, "\n".join(lines) + "\n")
    else:
        print("\n".join(lines))
    rejected, total = report.mutants_rejected
    summary = {"system": name, "bound": args.bound, "checked": len(report.records),
               "discrepancies": len(report.discrepancies), "mutants": total, "mutants_rejected": rejected}
    sys.stderr.write(json.dumps(summary, sort_keys=True) + "\n")
    return EX_NO if report.discrepancies else EX_OK


def cmd_demo(args) -> int:
    rows = analysis.anbm_table(args.max)
    if args.json:
        print(json.dumps(rows, sort_keys=True))
    else:
        print(f"{'n':>3} {'m':>3}  realizable  n>=m  agree")
        for r in rows:
            print(f"{r['n']:>3} {r['m']:>3}  {str(r['realizable']):<10}  {str(r['expected']):<5} {r['agree']}")
    if not all(r["agree"] for r in rows):
        return EX_INTERNAL
    return EX_OK


# ---------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="timedgraphs", description="Realizability of timing constraints, "
                "dynamic-logic formulas on graphs, and bounded analysis of timed systems.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, dot=True):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        if dot:
            sp.add_argument("--dot", metavar="FILE", help="write the relevant graph in DOT format")

    r = sub.add_parser("realizable", help="decide realizability of a weighted graph")
    r.add_argument("graph")
    r.add_argument("--M", type=int)
    r.add_argument("--method", choices=("direct", "tsm", "formula"), default="direct")
    r.add_argument("--witness", action="store_true", help="print timestamps when realizable")
    common(r)
    r.set_defaults(func=cmd_realizable)

    e = sub.add_parser("eval", help="evaluate a formula on a graph")
    e.add_argument("--graph", required=True)
    e.add_argument("--formula", required=True)
    common(e, dot=False)
    e.set_defaults(func=cmd_eval)

    g = sub.add_parser("gen-formula", help="print a generated formula as an s-expression")
    g.add_argument("kind", choices=("closed-realizability", "mixed-realizability", "system",
                                    "emptiness", "modelcheck"))
    g.add_argument("--M", type=int)
    g.add_argument("--system")
    g.add_argument("--spec")
    g.add_argument("--stats", action="store_true", help="print size and intersection width to stderr")
    g.set_defaults(func=cmd_gen_formula)

    m = sub.add_parser("empty", help="search a feasible run up to a length bound")
    m.add_argument("--system", required=True)
    m.add_argument("--bound", type=int, required=True)
    m.add_argument("--out", metavar="FILE", help="write the witness as JSON")
    common(m)
    m.set_defaults(func=cmd_empty)

    c = sub.add_parser("modelcheck", help="search a feasible run violating a specification")
    c.add_argument("--system", required=True)
    c.add_argument("--spec", required=True)
    c.add_argument("--bound", type=int, required=True)
    c.add_argument("--out", metavar="FILE", help="write the counterexample as JSON")
    common(c)
    c.set_defaults(func=cmd_modelcheck)

    x = sub.add_parser("crossval", help="compare the emptiness formula with run enumeration")
    x.add_argument("--system", required=True)
    x.add_argument("--bound", type=int, required=True)
    x.add_argument("--out", metavar="FILE", help="write the JSON-lines report here instead of stdout")
    x.add_argument("--no-mutants", action="store_true")
    x.set_defaults(func=cmd_crossval)

    d = sub.add_parser("demo", help="built-in demonstrations")
    d.add_argument("name", choices=("anbm",))
    d.add_argument("--max", type=int, default=6)
    d.add_argument("--json", action="store_true")
    d.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        sys.stderr.write(f"timedgraphs: {exc}\n")
        return EX_IOERR
    except (UsageError, GraphError, SExprError, SystemSpecError, InstructionError, SpecError,
            UndeclaredSymbol, ValueError) as exc:
        sys.stderr.write(f"timedgraphs: {exc}\n")
        return EX_USAGE
    except ResourceLimit as exc:
        sys.stderr.write(f"timedgraphs: {exc}\n")
        return EX_USAGE
    except (Disagreement, AssertionError) as exc:
        sys.stderr.write(f"timedgraphs: internal disagreement: {exc}\n")
        return EX_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
