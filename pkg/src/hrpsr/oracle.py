"""Ground-truth parsers: the naive nondeterministic shift-reduce parser with
exhaustive backtracking, and a definitional viable-prefix test.

Both are slow on purpose.  They exist to check the automaton-based parsers.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

from .graph import Graph, Literal, canonical_key, sequence_key
from .grammar import HRGrammar, expansions, last_nonterminal, start_graph
from .results import BudgetExceeded, Reject, finish


class ShiftBlocked(ValueError):
    pass


class NoMatch(ValueError):
    pass


class SideCondition(ValueError):
    pass


def _nodes(lits) -> set:
    out = set()
    for l in lits:
        out.update(l.nodes)
    return out


@dataclass(frozen=True)
class NaiveConfig:
    """Stack and read literals.  Node sets are the literal nodes."""
    stack: tuple = ()
    read: tuple = ()

    def stack_graph(self) -> Graph:
        return Graph.of(self.stack)

    def read_graph(self) -> Graph:
        return Graph.of(self.read)


def naive_shift(c: NaiveConfig, lit: Literal, remaining=None) -> NaiveConfig:
    if remaining is not None and lit not in remaining:
        raise ShiftBlocked(f"{lit} is not among the unread literals")
    clash = (set(lit.nodes) & _nodes(c.read)) - _nodes(c.stack)
    if clash:
        raise ShiftBlocked(f"{lit} touches read nodes {sorted(clash)} that left the stack")
    return NaiveConfig(c.stack + (lit,), c.read + (lit,))


def _match_suffix(rule, suffix) -> dict:
    """Positional match of a rule's rhs literals onto ``suffix``, or None."""
    mu = {}
    used = set()
    for pat, l in zip(rule.rhs.lits, suffix):
        if pat.label != l.label:
            return None
        for n, x in zip(pat.nodes, l.nodes):
            if n in mu:
                if mu[n] != x:
                    return None
            elif x in used:
                return None
            else:
                mu[n] = x
                used.add(x)
    return mu


def reduce_candidates(grammar: HRGrammar, stack: tuple, rules=None):
    """Every reduce move the naive parser may make on ``stack``.

    Yields ``(rule_index, mu, new_stack)``.  Left-hand side nodes that do not
    occur on the right-hand side literals are matched with nodes of the
    remaining stack; isolated right-hand side nodes stay unmatched.
    ``rules`` restricts the rules tried.
    """
    for i in rules if rules is not None else range(1, len(grammar.rules)):
        rule = grammar.rules[i]
        if i == 0:
            continue
        k = len(rule.rhs.lits)
        if k > len(stack):
            continue
        alpha = stack[:len(stack) - k]
        mu = _match_suffix(rule, stack[len(stack) - k:])
        if mu is None:
            continue
        alpha_nodes = _nodes(alpha)
        loose = [n for n in rule.lhs.nodes if n not in mu]
        pool = sorted(alpha_nodes - set(mu.values()))
        for pick in permutations(pool, len(loose)):
            full = dict(mu)
            full.update(zip(loose, pick))
            lhs = rule.lhs.rename(full)
            if (alpha_nodes & set(full.values())) - set(lhs.nodes):
                continue
            yield i, full, alpha + (lhs,)


def naive_reduce(grammar: HRGrammar, c: NaiveConfig, rule_index: int, mu: dict) -> NaiveConfig:
    rule = grammar.rules[rule_index]
    k = len(rule.rhs.lits)
    image = tuple(l.rename(mu) for l in rule.rhs.lits)
    if k > len(c.stack) or c.stack[len(c.stack) - k:] != image:
        raise NoMatch(f"stack does not end with the right-hand side of rule {rule_index}")
    alpha = c.stack[:len(c.stack) - k]
    lhs = rule.lhs.rename(mu)
    bad = _nodes(alpha) & (_nodes(image) | set(lhs.nodes)) - set(lhs.nodes)
    if bad:
        raise SideCondition(f"nodes {sorted(bad)} would be removed but occur below")
    return NaiveConfig(alpha + (lhs,), c.read)


class _Budget(Exception):
    pass


class LabelAutomaton:
    """LR(0) item sets of the grammar with nodes erased.

    A stack whose label sequence is not a viable prefix of this string
    grammar cannot occur in a successful parse (erasing nodes from a
    rightmost derivation leaves a rightmost string derivation), so the
    naive search may drop it without losing completeness.
    """

    def __init__(self, grammar: HRGrammar):
        self.grammar = grammar
        self.labels = [tuple(l.label for l in r.rhs.lits) for r in grammar.rules]
        self._goto = {}
        self.initial = self._close({(0, 0)})

    def _close(self, items) -> frozenset:
        out = set(items)
        todo = list(items)
        while todo:
            r, d = todo.pop()
            rhs = self.labels[r]
            if d < len(rhs) and not self.grammar.is_terminal(rhs[d]):
                for r2 in self.grammar.by_lhs.get(rhs[d], ()):
                    if (r2, 0) not in out:
                        out.add((r2, 0))
                        todo.append((r2, 0))
        return frozenset(out)

    def goto(self, state: frozenset, label: str):
        key = (state, label)
        if key not in self._goto:
            moved = {(r, d + 1) for r, d in state
                     if d < len(self.labels[r]) and self.labels[r][d] == label}
            self._goto[key] = self._close(moved) if moved else None
        return self._goto[key]

    def can_reduce(self, state: frozenset, rule_index: int) -> bool:
        return (rule_index, len(self.labels[rule_index])) in state

    def reducible(self, state: frozenset) -> list:
        return sorted(r for r, d in state if r != 0 and d == len(self.labels[r]))


def naive_parse(grammar: HRGrammar, graph: Graph, budget: int = 1_000_000,
                stack_cap: int = None, prune: bool = True, visit=None):
    """Exhaustive depth-first search over all naive parser move sequences.

    Stacks longer than ``stack_cap`` (default ``max_rhs * (m + 1)`` for an
    input of m literals) are cut off.  With ``prune`` the search also drops
    stacks whose label sequence the ``LabelAutomaton`` rejects.
    ``visit(config)`` sees every configuration explored.
    """
    lits = tuple(sorted(graph.lits))
    z = Literal(grammar.start, ())
    if stack_cap is None:
        stack_cap = max(grammar.max_rhs(), 1) * (len(lits) + 1)
    labels = LabelAutomaton(grammar) if prune else None
    failed = set()
    count = [0]

    def push(states, label):
        if labels is None:
            return states
        nxt = labels.goto(states[-1], label)
        return None if nxt is None else states + (nxt,)

    def go(stack, states, read, unread, reductions):
        key = (stack, read)
        if key in failed:
            return None
        count[0] += 1
        if count[0] > budget:
            raise _Budget()
        if visit is not None:
            visit(NaiveConfig(stack, read))
        if not unread and stack == (z,):
            return reductions
        stack_nodes = _nodes(stack)
        read_nodes = _nodes(read)
        if len(stack) < stack_cap:
            for j, l in enumerate(unread):
                if j and unread[j - 1] == l:
                    continue
                if (set(l.nodes) & read_nodes) - stack_nodes:
                    continue
                s2 = push(states, l.label)
                if s2 is None:
                    continue
                res = go(stack + (l,), s2, tuple(sorted(read + (l,))),
                         unread[:j] + unread[j + 1:], reductions)
                if res is not None:
                    return res
        allowed = labels.reducible(states[-1]) if labels is not None else None
        for i, mu, new in reduce_candidates(grammar, stack, allowed):
            if len(new) > stack_cap:
                continue
            if labels is not None:
                s2 = push(states[:len(states) - len(grammar.rules[i].rhs.lits)], new[-1].label)
                if s2 is None:
                    continue
            else:
                s2 = states
            res = go(new, s2, read, unread, reductions + [(i, mu)])
            if res is not None:
                return res
        failed.add(key)
        return None

    try:
        found = go((), (labels.initial,) if labels else (), (), lits, [])
    except _Budget:
        return BudgetExceeded(count[0])
    if found is None:
        return Reject("no move sequence reaches the start literal", count[0])
    return finish(grammar, found, graph, count[0], [])


def _form_key(lits) -> tuple:
    return sequence_key(lits)


@lru_cache(maxsize=None)
def _viable_keys(grammar: HRGrammar, depth: int) -> frozenset:
    """Keys of all prefixes of ``alpha beta`` over derivations of <= depth steps."""
    keys = {_form_key(())}
    seen = set()
    frontier = [start_graph()]
    for _ in range(depth):
        nxt = []
        for g in frontier:
            pos = last_nonterminal(grammar, g.lits)
            for step, h in expansions(grammar, g):
                rhs = len(grammar.rules[step.rule_index].rhs.lits)
                ab = h.lits[:pos + rhs]
                for k in range(len(ab) + 1):
                    keys.add(_form_key(ab[:k]))
                k = (_form_key(h.lits), len(h.isolated()))
                if k not in seen and last_nonterminal(grammar, h.lits) >= 0:
                    seen.add(k)
                    nxt.append(h)
        frontier = nxt
    return frozenset(keys)


def viable_prefix_check(grammar: HRGrammar, gamma, depth: int = 8) -> bool:
    """Is ``gamma`` (a graph or literal sequence) a viable prefix, searching
    derivations of at most ``depth`` steps?  May answer False for viable
    prefixes that need longer derivations."""
    lits = tuple(gamma.lits if isinstance(gamma, Graph) else gamma)
    return _form_key(lits) in _viable_keys(grammar, depth)


def small_graphs(alphabet: dict, max_lits: int, max_nodes: int, max_count: dict = None,
                 isolated: bool = True) -> list:
    """All graphs over ``alphabet`` (label -> arity) up to renaming and literal order.

    At most ``max_lits`` literals, ``max_nodes`` nodes and ``max_count[label]``
    literals per label.  With ``isolated``, variants padded with isolated
    nodes up to ``max_nodes`` are included.
    """
    max_count = max_count or {}
    labels = sorted(alphabet)
    found = {}
    frontier = {canonical_key(Graph.of(())): Graph.of(())}
    while frontier:
        nxt = {}
        for g in frontier.values():
            found.setdefault(canonical_key(g), g)
            if len(g.lits) == max_lits:
                continue
            n = len(g.nodes)
            counts = {}
            for l in g.lits:
                counts[l.label] = counts.get(l.label, 0) + 1
            for label in labels:
                if counts.get(label, 0) >= max_count.get(label, max_lits):
                    continue
                k = alphabet[label]
                pool = [str(i) for i in range(1, min(n + k, max_nodes) + 1)]
                for nodes in permutations(pool, k):
                    # new nodes are introduced in increasing order
                    new = sorted(int(x) for x in nodes if int(x) > n)
                    if new != list(range(n + 1, n + 1 + len(new))):
                        continue
                    h = Graph.of(g.lits + (Literal(label, nodes),), g.nodes)
                    key = canonical_key(h)
                    if key not in found and key not in nxt:
                        nxt[key] = h
        frontier = nxt
    out = list(found.values())
    if isolated:
        padded = []
        for g in out:
            for extra in range(1, max_nodes - len(g.nodes) + 1):
                names = [f"{len(g.nodes) + i}" for i in range(1, extra + 1)]
                padded.append(Graph.of(g.lits, list(g.nodes) + names))
        out += padded
    return sorted(out, key=lambda g: (len(g.lits), len(g.nodes), canonical_key(g)))
