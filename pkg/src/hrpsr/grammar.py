"""HR grammars, rightmost derivations and bounded language enumeration."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .graph import (Graph, GraphError, Literal, Symbol, canonical_graph,
                    canonical_key, check_injective, fresh_names, sequence_key)

START = "Start"


class GrammarError(ValueError):
    pass


class ArityMismatch(GrammarError):
    pass


class UnknownSymbol(GrammarError):
    pass


class DuplicateNodesInLiteral(GrammarError):
    pass


class LhsNodeNotInRhs(GrammarError):
    pass


class NotReduced(GrammarError):
    pass


class StartArityNonzero(GrammarError):
    pass


class DerivationError(GrammarError):
    pass


class MatchClash(DerivationError):
    pass


class NotRightmost(DerivationError):
    pass


class BoundExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Rule:
    lhs: Literal
    rhs: Graph
    name: str = ""

    def nodes(self) -> frozenset:
        return self.rhs.nodes

    def __len__(self):
        return len(self.rhs.lits)

    def __str__(self):
        rhs = " ".join(map(str, self.rhs.lits))
        return f"{self.lhs} -> {rhs}".rstrip()


@dataclass(frozen=True)
class DerivationStep:
    rule_index: int
    match: Mapping[str, str]
    position: int

    def __hash__(self):
        return hash((self.rule_index, tuple(sorted(self.match.items())), self.position))


@dataclass
class ReducedReport:
    reachable: dict
    productive: dict

    @property
    def ok(self) -> bool:
        return all(self.reachable.values()) and all(self.productive.values())

    def unreachable(self) -> list:
        return sorted(n for n, v in self.reachable.items() if not v)

    def unproductive(self) -> list:
        return sorted(n for n, v in self.productive.items() if not v)


class HRGrammar:
    """A validated grammar; ``rules[0]`` is the added rule ``Start() -> Z()``.

    Rule numbers 1.. follow the order in which the rules were given.
    """

    def __init__(self, symbols: Mapping[str, Symbol], rules: Sequence[Rule], start: str):
        self.symbols = dict(symbols)
        self.rules = tuple(rules)
        self.start = start
        self.by_lhs = {}
        for i, r in enumerate(self.rules):
            self.by_lhs.setdefault(r.lhs.label, []).append(i)
        self._min_yield = None

    @property
    def augmented_rule(self) -> Rule:
        return self.rules[0]

    def is_terminal(self, label: str) -> bool:
        return self.symbols[label].terminal

    def terminals(self) -> list:
        return sorted(s.name for s in self.symbols.values() if s.terminal)

    def nonterminals(self) -> list:
        """User nonterminals, i.e. without the added start label."""
        return sorted(s.name for s in self.symbols.values()
                      if not s.terminal and s.name != START)

    def rule_name(self, i: int) -> str:
        return self.rules[i].name or str(i)

    def max_rhs(self) -> int:
        return max(len(r) for r in self.rules)

    def min_yield(self) -> dict:
        """Least number of terminal literals any nonterminal derives."""
        if self._min_yield is None:
            inf = float("inf")
            best = {n: inf for n in self.symbols if not self.is_terminal(n)}
            changed = True
            while changed:
                changed = False
                for r in self.rules:
                    cost = sum(1 if self.is_terminal(l.label) else best[l.label]
                               for l in r.rhs.lits)
                    if cost < best[r.lhs.label]:
                        best[r.lhs.label] = cost
                        changed = True
            self._min_yield = best
        return self._min_yield

    def derive_step(self, g: Graph, step: DerivationStep) -> Graph:
        return derive_step(self, g, step)

    def __repr__(self):
        return f"HRGrammar({len(self.rules) - 1} rules, start={self.start})"


def check_reduced(symbols: Mapping[str, Symbol], rules: Sequence[Rule], start: str) -> ReducedReport:
    nts = [s.name for s in symbols.values() if not s.terminal]
    productive = {n: False for n in nts}
    changed = True
    while changed:
        changed = False
        for r in rules:
            if productive.get(r.lhs.label):
                continue
            if all(symbols[l.label].terminal or productive[l.label] for l in r.rhs.lits):
                productive[r.lhs.label] = True
                changed = True
    reachable = {n: False for n in nts}
    reachable[start] = True
    todo = [start]
    while todo:
        a = todo.pop()
        for r in rules:
            if r.lhs.label != a:
                continue
            for l in r.rhs.lits:
                if not symbols[l.label].terminal and not reachable[l.label]:
                    reachable[l.label] = True
                    todo.append(l.label)
    return ReducedReport(reachable, productive)


def _check_literal(l: Literal, symbols: Mapping[str, Symbol], where: str) -> None:
    if l.label not in symbols:
        raise UnknownSymbol(f"{where}: undeclared symbol {l.label}")
    if symbols[l.label].arity != len(l.nodes):
        raise ArityMismatch(f"{where}: {l} has {len(l.nodes)} nodes, "
                            f"{l.label} has arity {symbols[l.label].arity}")


def validate_and_augment(symbols: Iterable[Symbol], rules: Sequence[Rule], start: str) -> HRGrammar:
    table = {}
    for s in symbols:
        if s.name in table and table[s.name] != s:
            raise ArityMismatch(f"symbol {s.name} declared twice")
        if s.name == START:
            raise GrammarError(f"symbol name {START} is reserved")
        table[s.name] = s
    if start not in table:
        raise UnknownSymbol(f"start symbol {start} not declared")
    if table[start].terminal:
        raise GrammarError(f"start symbol {start} is a terminal")
    if table[start].arity != 0:
        raise StartArityNonzero(f"start symbol {start} has arity {table[start].arity}")
    for i, r in enumerate(rules, 1):
        where = f"rule {r.name or i}"
        _check_literal(r.lhs, table, where)
        if table[r.lhs.label].terminal:
            raise GrammarError(f"{where}: left-hand side {r.lhs} is terminal")
        for l in r.rhs.lits:
            _check_literal(l, table, where)
        missing = set(r.lhs.nodes) - r.rhs.nodes
        if missing:
            raise LhsNodeNotInRhs(f"{where}: nodes {sorted(missing)} of {r.lhs} not in rhs")
    report = check_reduced(table, rules, start)
    if not report.ok:
        raise NotReduced(f"unreachable={report.unreachable()} unproductive={report.unproductive()}")
    table[START] = Symbol(START, 0, False)
    aug = Rule(Literal(START, ()), Graph.of([Literal(start, ())]), "start")
    return HRGrammar(table, (aug,) + tuple(rules), start)


def make_rule(lhs: Literal, rhs_lits: Sequence[Literal], name: str = "") -> Rule:
    """Rule whose rhs node set is its literal nodes plus the lhs nodes."""
    try:
        rhs = Graph.of(rhs_lits, lhs.nodes)
    except GraphError as exc:
        raise DuplicateNodesInLiteral(str(exc)) from None
    return Rule(lhs, rhs, name)


def last_nonterminal(grammar: HRGrammar, lits: Sequence[Literal]) -> int:
    for i in range(len(lits) - 1, -1, -1):
        if not grammar.is_terminal(lits[i].label):
            return i
    return -1


def derive_step(grammar: HRGrammar, g: Graph, step: DerivationStep) -> Graph:
    rule = grammar.rules[step.rule_index]
    pos = step.position
    if pos != last_nonterminal(grammar, g.lits):
        raise NotRightmost(f"position {pos} is not the last nonterminal of {g}")
    mu = dict(step.match)
    if set(mu) != set(rule.nodes()):
        raise DerivationError(f"match must cover exactly the rule nodes {sorted(rule.nodes())}")
    if g.lits[pos] != rule.lhs.rename(mu):
        raise DerivationError(f"{rule.lhs} under the match is not {g.lits[pos]}")
    clash = {mu[n] for n in rule.nodes() - set(rule.lhs.nodes)} & g.nodes
    if clash:
        raise MatchClash(f"nodes {sorted(clash)} already occur in {g}")
    check_injective(mu, rule.nodes())
    image = {mu[n] for n in rule.nodes()}
    new = tuple(l.rename(mu) for l in rule.rhs.lits)
    return Graph(g.nodes | image, g.lits[:pos] + new + g.lits[pos + 1:])


def fresh_match(grammar: HRGrammar, g: Graph, rule_index: int, pos: int) -> dict:
    """The match that binds the rule's new nodes to the smallest unused names."""
    rule = grammar.rules[rule_index]
    target = g.lits[pos]
    mu = dict(zip(rule.lhs.nodes, target.nodes))
    extra = sorted(rule.nodes() - set(rule.lhs.nodes))
    for n, f in zip(extra, fresh_names(g.nodes, len(extra))):
        mu[n] = f
    return mu


def start_graph() -> Graph:
    return Graph.of([Literal(START, ())])


def expansions(grammar: HRGrammar, g: Graph) -> Iterator[tuple]:
    """All one-step rightmost derivations of g, as (step, result)."""
    pos = last_nonterminal(grammar, g.lits)
    if pos < 0:
        return
    for i in grammar.by_lhs.get(g.lits[pos].label, ()):
        step = DerivationStep(i, fresh_match(grammar, g, i, pos), pos)
        yield step, derive_step(grammar, g, step)


def _form_key(g: Graph) -> tuple:
    return sequence_key(g.lits), len(g.isolated())


def derivations(grammar: HRGrammar, max_steps: int, source: Graph = None) -> Iterator[tuple]:
    """Every rightmost derivation of at most ``max_steps`` steps from ``source``.

    Yields ``(steps, forms)`` where ``forms[0]`` is the source and
    ``forms[i+1]`` results from ``steps[i]``.  Every prefix is yielded too.
    """
    source = source or start_graph()
    stack = [((), (source,))]
    while stack:
        steps, forms = stack.pop()
        yield steps, forms
        if len(steps) == max_steps:
            continue
        nxt = list(expansions(grammar, forms[-1]))
        for step, h in reversed(nxt):
            stack.append((steps + (step,), forms + (h,)))


def enumerate_derivations(grammar: HRGrammar, max_lits: int, max_nodes: int = None,
                          cap: int = 500_000) -> dict:
    """Terminal graphs with at most ``max_lits`` literals, with one derivation each.

    Returns ``{canonical_key: (graph, steps)}``; steps start from ``Z()``.
    Sentential forms are deduplicated up to renaming, which is sound because
    derivability is closed under renaming.
    """
    minimum = grammar.min_yield()
    z = Graph.of([Literal(grammar.start, ())])
    seen = {_form_key(z)}
    queue = deque([(z, ())])
    out = {}
    while queue:
        g, steps = queue.popleft()
        pos = last_nonterminal(grammar, g.lits)
        if pos < 0:
            key = canonical_key(g)
            out.setdefault(key, (g, steps))
            continue
        for step, h in expansions(grammar, g):
            need = sum(1 if grammar.is_terminal(l.label) else minimum[l.label] for l in h.lits)
            if need > max_lits:
                continue
            if max_nodes is not None and len(h.nodes) > max_nodes:
                continue
            k = _form_key(h)
            if k in seen:
                continue
            seen.add(k)
            if len(seen) > cap:
                raise BoundExceeded(f"more than {cap} sentential forms")
            queue.append((h, steps + (step,)))
    return out


def enumerate_language(grammar: HRGrammar, max_lits: int, max_nodes: int = None,
                       cap: int = 500_000) -> list:
    """Derivable terminal graphs up to the bounds, one canonical graph per class."""
    found = enumerate_derivations(grammar, max_lits, max_nodes, cap)
    return [canonical_graph(g) for g, _ in found.values()]


def replay(grammar: HRGrammar, steps: Sequence[DerivationStep], source: Graph = None) -> Graph:
    g = source or Graph.of([Literal(grammar.start, ())])
    for s in steps:
        g = derive_step(grammar, g, s)
    return g


def membership_index(grammar: HRGrammar, max_lits: int, max_nodes: int = None) -> set:
    return set(enumerate_derivations(grammar, max_lits, max_nodes))


def is_member(index: set, g: Graph) -> bool:
    return canonical_key(g) in index
