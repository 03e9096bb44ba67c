"""Text formats for grammars and graphs.

Grammar files::

    start Z
    term root 1
    term e 2
    nonterm T 1
    rule Z() -> root(x) T(x)
    rule T(y) -> T(y) e(y,z) T(z)
    rule T(y) ->

An optional ``name:`` before the left-hand side names a rule, as in
``rule p: M(r,x) -> ...``.  Graph files list literal terms separated by
whitespace, plus optional ``node <id>...`` lines for isolated nodes.
"""
from __future__ import annotations

import re
from importlib import resources

from .graph import FRESH_PREFIX, Graph, Literal, Symbol, valid_node_name
from .grammar import HRGrammar, make_rule, validate_and_augment


class SyntaxErrorAt(ValueError):
    def __init__(self, msg: str, line: int, col: int = 1):
        super().__init__(f"line {line}:{col}: {msg}")
        self.line = line
        self.col = col


_TERM = re.compile(r"([A-Za-z_][A-Za-z0-9_']*)\s*\(([^()]*)\)")


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _terms(text: str, lineno: int, offset: int = 0) -> list:
    """Split ``text`` into literal terms, complaining about leftovers."""
    out = []
    pos = 0
    for m in _TERM.finditer(text):
        gap = text[pos:m.start()]
        if gap.strip():
            raise SyntaxErrorAt(f"unexpected {gap.strip()!r}", lineno, offset + pos + 1)
        args = [a.strip() for a in m.group(2).split(",")] if m.group(2).strip() else []
        for a in args:
            if not valid_node_name(a):
                raise SyntaxErrorAt(f"bad node name {a!r}", lineno, offset + m.start() + 1)
        out.append((m.group(1), args, offset + m.start() + 1))
        pos = m.end()
    if text[pos:].strip():
        raise SyntaxErrorAt(f"unexpected {text[pos:].strip()!r}", lineno, offset + pos + 1)
    return out


def _literal(name, args, symbols, lineno, col) -> Literal:
    if name not in symbols:
        raise SyntaxErrorAt(f"undeclared symbol {name}", lineno, col)
    if symbols[name].arity != len(args):
        raise SyntaxErrorAt(f"{name} expects {symbols[name].arity} nodes, got {len(args)}",
                            lineno, col)
    if len(set(args)) != len(args):
        raise SyntaxErrorAt(f"{name}({','.join(args)}) attaches a node twice", lineno, col)
    return Literal(name, tuple(args))


def parse_grammar_text(text: str) -> HRGrammar:
    symbols = {}
    start = None
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        if word in ("term", "nonterm"):
            parts = rest.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise SyntaxErrorAt(f"expected '{word} <name> <arity>'", lineno)
            name, arity = parts[0], int(parts[1])
            if name in symbols:
                raise SyntaxErrorAt(f"symbol {name} declared twice", lineno)
            symbols[name] = Symbol(name, arity, word == "term")
        elif word == "start":
            if not rest or len(rest.split()) != 1:
                raise SyntaxErrorAt("expected 'start <name>'", lineno)
            start = rest
        elif word == "rule":
            if "->" not in rest:
                raise SyntaxErrorAt("rule without '->'", lineno)
            left, right = rest.split("->", 1)
            name = ""
            if ":" in left:
                name, left = left.split(":", 1)
                name = name.strip()
            off = raw.find("->") + 2
            lhs_terms = _terms(left, lineno, raw.find(left.strip()) if left.strip() else 0)
            if len(lhs_terms) != 1:
                raise SyntaxErrorAt("rule needs exactly one left-hand side literal", lineno)
            if start is not None and start not in symbols:
                symbols[start] = Symbol(start, 0, False)
            lhs = _literal(*lhs_terms[0][:2], symbols, lineno, lhs_terms[0][2])
            rhs = [_literal(n, a, symbols, lineno, c) for n, a, c in _terms(right, lineno, off)]
            rules.append(make_rule(lhs, rhs, name))
        else:
            raise SyntaxErrorAt(f"unknown directive {word!r}", lineno)
    if start is None:
        raise SyntaxErrorAt("missing 'start' directive", 1)
    if start not in symbols:
        symbols[start] = Symbol(start, 0, False)
    return validate_and_augment(symbols.values(), rules, start)


def parse_graph_text(text: str, grammar: HRGrammar = None) -> Graph:
    lits = []
    nodes = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("node ") or line == "node":
            for n in line.split()[1:]:
                if not valid_node_name(n):
                    raise SyntaxErrorAt(f"bad node name {n!r}", lineno)
                nodes.append(n)
            continue
        for name, args, col in _terms(raw.split("#")[0], lineno):
            if grammar is not None:
                if name not in grammar.symbols or not grammar.is_terminal(name):
                    raise SyntaxErrorAt(f"{name} is not a terminal of the grammar", lineno, col)
                l = _literal(name, args, grammar.symbols, lineno, col)
            else:
                if len(set(args)) != len(args):
                    raise SyntaxErrorAt(f"{name}({','.join(args)}) attaches a node twice",
                                        lineno, col)
                l = Literal(name, tuple(args))
            lits.append(l)
    for n in nodes + [n for l in lits for n in l.nodes]:
        if n.startswith(FRESH_PREFIX):
            raise SyntaxErrorAt(f"node names may not start with {FRESH_PREFIX}", 1)
    return Graph.of(lits, nodes)


def format_graph(g: Graph) -> str:
    out = []
    iso = sorted(g.isolated())
    if iso:
        out.append("node " + " ".join(iso))
    out.extend(str(l) for l in g.lits)
    return "\n".join(out) + "\n"


def format_grammar(grammar: HRGrammar) -> str:
    out = [f"start {grammar.start}"]
    for s in sorted(grammar.symbols.values(), key=lambda s: (not s.terminal, s.name)):
        if s.name == "Start" or (s.name == grammar.start and s.arity == 0 and not s.terminal):
            continue
        out.append(f"{'term' if s.terminal else 'nonterm'} {s.name} {s.arity}")
    for r in grammar.rules[1:]:
        head = f"{r.name}: " if r.name else ""
        out.append(f"rule {head}{r}")
    return "\n".join(out) + "\n"


BUILTIN = ("trees", "persuade", "series_parallel")


def builtin_text(name: str) -> str:
    return resources.files("hrpsr.grammars").joinpath(f"{name}.hrg").read_text()


def load_builtin(name: str) -> HRGrammar:
    return parse_grammar_text(builtin_text(name))
