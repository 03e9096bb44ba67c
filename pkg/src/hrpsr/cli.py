"""Command line interface.

Exit status: 0 success, 1 rejected input or grammar not PSR-parsable,
2 usage or I/O problem, 3 internal invariant violation.  Diagnostics go to
stderr as ``key=value`` lines.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analysis import analyze
from .cfa import build_dcfa, build_ncfa
from .fec import check_fec
from .grammar import GrammarError, HRGrammar, membership_index, is_member
from .graph import GraphError
from .oracle import naive_parse, small_graphs
from .render import dcfa_dot, format_counts, format_tables, ncfa_dot
from .runtime import psr_parse
from .textio import BUILTIN, SyntaxErrorAt, load_builtin, parse_grammar_text, parse_graph_text

OK, REJECT, USAGE, INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _diag(out, **fields) -> None:
    for k, v in fields.items():
        print(f"{k}={v}", file=out)


def load_grammar(source: str) -> HRGrammar:
    path = Path(source)
    if not path.exists() and source in BUILTIN:
        return load_builtin(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read grammar {source}: {exc.strerror}") from None
    return parse_grammar_text(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def cmd_analyze(args, out, err) -> int:
    grammar = load_grammar(args.grammar)
    tables = analyze(build_dcfa(grammar))
    verdict = check_fec(tables, args.fec, max_lits=args.max_lits)
    print(f"{format_counts(tables.dcfa)} conflicts={len(tables.conflicts)} "
          f"cycles={len(tables.cycles)} fec={verdict.short()}", file=out)
    for s, members in tables.conflicts:
        ids = " ".join(f"{s}.{o}" for o in sorted(members))
        print(f"conflict state={s} triggers={ids}", file=out)
    for k, v in verdict.witness.items():
        print(f"fec.{k}={v}", file=out)
    return OK if tables.conflict_free and verdict.yes else REJECT


def cmd_tables(args, out, err) -> int:
    grammar = load_grammar(args.grammar)
    text = format_tables(analyze(build_dcfa(grammar)))
    if args.output in (None, "-"):
        out.write(text)
    else:
        try:
            Path(args.output).write_text(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.output}: {exc.strerror}") from None
    return OK


def _format_step(grammar, step) -> str:
    match = ",".join(f"{k}/{v}" for k, v in sorted(step.match.items()))
    return f"{grammar.rule_name(step.rule_index)}: {grammar.rules[step.rule_index]} [{match}]"


def cmd_parse(args, out, err) -> int:
    grammar = load_grammar(args.grammar)
    graph = parse_graph_text(_read(args.graph), grammar)
    tables = analyze(build_dcfa(grammar))
    conclusive = True
    if not tables.conflict_free:
        _diag(err, warning="grammar has conflicts; the trigger order is a fallback",
              conflicts=len(tables.conflicts))
        conclusive = False
    if args.fec == "check-dynamic":
        verdict = check_fec(tables, "dynamic")
        _diag(err, fec=verdict.short())
        conclusive = conclusive and verdict.yes
    result = psr_parse(tables, graph, trace=args.trace, check_every=args.check_every)
    if args.trace:
        for line in result.trace:
            print(line, file=out)
    if result.accepted:
        print(f"accepted=yes moves={result.moves} steps={len(result.derivation)}", file=out)
        for step in result.derivation:
            print(_format_step(grammar, step), file=out)
        return OK
    print(f"accepted=no moves={result.moves}", file=out)
    _diag(err, reason=result.reason, conclusive="yes" if conclusive else "no",
          **{k.replace(" ", "_"): v for k, v in result.details.items()})
    return REJECT


def cmd_dot(args, out, err) -> int:
    grammar = load_grammar(args.grammar)
    out.write(ncfa_dot(build_ncfa(grammar)) if args.ncfa else dcfa_dot(build_dcfa(grammar)))
    return OK


def cmd_oracle(args, out, err) -> int:
    grammar = load_grammar(args.grammar)
    tables = analyze(build_dcfa(grammar))
    k = args.max_lits
    max_nodes = args.max_nodes if args.max_nodes is not None else k + 2
    alphabet = {t: grammar.symbols[t].arity for t in grammar.terminals()}
    members = membership_index(grammar, k, max_nodes)
    total = accepted = disagreements = 0
    for g in small_graphs(alphabet, k, max_nodes):
        total += 1
        psr = psr_parse(tables, g)
        naive = naive_parse(grammar, g, budget=args.budget)
        if naive.accepted is None:
            _diag(err, error="naive parser budget exceeded",
                  input=" ".join(map(str, g.lits)) or "-")
            return INTERNAL
        member = is_member(members, g)
        accepted += psr.accepted
        if not (psr.accepted == naive.accepted == member):
            disagreements += 1
            _diag(err, disagreement=" ".join(map(str, g.lits)) or "-",
                  psr=psr.accepted, naive=naive.accepted, member=member)
    print(f"graphs={total} accepted={accepted} disagreements={disagreements}", file=out)
    return OK if disagreements == 0 else REJECT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hrpsr", description="Predictive shift-reduce parsing "
                                "for hyperedge replacement grammars.")
    sub = p.add_subparsers(dest="command", required=True)
    grammar_help = f"grammar file, or one of the built-in grammars: {', '.join(BUILTIN)}"

    a = sub.add_parser("analyze", help="automaton sizes, conflicts and free edge choice")
    a.add_argument("grammar", help=grammar_help)
    a.add_argument("--fec", choices=("auto", "static", "dynamic", "assume"), default="auto")
    a.add_argument("--max-lits", type=int, default=5,
                   help="largest language graphs used by the dynamic check")
    a.set_defaults(run=cmd_analyze)

    t = sub.add_parser("tables", help="dump the parser tables")
    t.add_argument("grammar", help=grammar_help)
    t.add_argument("-o", "--output")
    t.set_defaults(run=cmd_tables)

    r = sub.add_parser("parse", help="parse a graph")
    r.add_argument("grammar", help=grammar_help)
    r.add_argument("graph")
    r.add_argument("--trace", action="store_true")
    r.add_argument("--fec", choices=("assume", "check-dynamic"), default="assume")
    r.add_argument("--check-every", type=int, default=16,
                   help="re-check the stack with the automaton every N moves (0: never)")
    r.set_defaults(run=cmd_parse)

    d = sub.add_parser("dot", help="DOT text of an automaton")
    d.add_argument("grammar", help=grammar_help)
    which = d.add_mutually_exclusive_group(required=True)
    which.add_argument("--ncfa", action="store_true")
    which.add_argument("--dcfa", action="store_true")
    d.set_defaults(run=cmd_dot)

    o = sub.add_parser("oracle", help="compare the parser with the naive parser")
    o.add_argument("grammar", help=grammar_help)
    o.add_argument("--max-lits", type=int, required=True)
    o.add_argument("--max-nodes", type=int)
    o.add_argument("--budget", type=int, default=1_000_000)
    o.set_defaults(run=cmd_oracle)
    return p


def run_command(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.run(args, out, err)
    except UsageError as exc:
        _diag(err, error=str(exc))
        return USAGE
    except SyntaxErrorAt as exc:
        _diag(err, error="syntax", line=exc.line, col=exc.col, message=str(exc))
        return USAGE
    except (GrammarError, GraphError) as exc:
        _diag(err, error=type(exc).__name__, message=str(exc))
        return USAGE
    except AssertionError as exc:
        _diag(err, error="internal", message=str(exc) or "assertion failed")
        return INTERNAL


def main() -> None:
    sys.exit(run_command())
