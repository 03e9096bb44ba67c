"""Parse outcomes shared by every parser, and derivation extraction."""
from __future__ import annotations

from dataclasses import dataclass, field

from .graph import Graph, Literal, fresh_names, graph_equivalent
from .grammar import DerivationError, DerivationStep, HRGrammar, MatchClash


@dataclass
class Accept:
    derivation: list  # [DerivationStep] from Z()
    graph: Graph  # replayed result, equivalent to the input
    moves: int = 0
    trace: list = field(default_factory=list)

    accepted = True


@dataclass
class Reject:
    reason: str
    moves: int = 0
    trace: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    accepted = False


@dataclass
class BudgetExceeded:
    explored: int

    accepted = None


def extract_derivation(grammar: HRGrammar, reductions: list, target: Graph = None) -> tuple:
    """Turn a list of ``(rule, match)`` reductions into a rightmost derivation.

    Rule nodes the parser never bound (isolated nodes that are neither on the
    left-hand side nor on a right-hand side literal) are named after the
    isolated nodes of ``target`` where possible, else with fresh names.
    Returns ``(steps, graph)``.

    The sentential form is kept as ``head`` (up to its last nonterminal) and
    the reversed terminal ``tail``, so the whole replay takes linear time.
    """
    head = [Literal(grammar.start, ())]
    tail = []
    nodes = set()
    spare = sorted(target.isolated()) if target is not None else []
    used = set(target.nodes) if target is not None else set()
    steps = []
    for rule_index, mu in reversed(reductions):
        rule = grammar.rules[rule_index]
        match = dict(mu)
        for n in sorted(rule.nodes() - set(match)):
            if spare:
                match[n] = spare.pop(0)
            else:
                match[n] = fresh_names(used | nodes, 1)[0]
            used.add(match[n])
        if not head or head[-1] != rule.lhs.rename(match):
            raise DerivationError(f"rule {rule_index} does not rewrite the last nonterminal")
        fresh = {match[n] for n in rule.nodes() - set(rule.lhs.nodes)}
        if fresh & nodes or len(fresh) != len(rule.nodes()) - len(rule.lhs.nodes):
            raise MatchClash(f"rule {rule_index} reuses nodes {sorted(fresh & nodes)}")
        steps.append(DerivationStep(rule_index, match, len(head) - 1))
        head.pop()
        head.extend(l.rename(match) for l in rule.rhs.lits)
        nodes |= {match[n] for n in rule.nodes()}
        while head and grammar.is_terminal(head[-1].label):
            tail.append(head.pop())
    return steps, Graph(frozenset(nodes), tuple(head) + tuple(reversed(tail)))


def finish(grammar, reductions, target, moves, trace):
    steps, g = extract_derivation(grammar, reductions, target)
    if not graph_equivalent(g, target):
        return Reject("derived graph differs from the input (isolated nodes)", moves, trace)
    return Accept(steps, g, moves, trace)
