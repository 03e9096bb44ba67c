"""Agreement checks between the parsers and the oracles."""
from __future__ import annotations

from dataclasses import dataclass, field

from .analysis import AnalysisTables, reducible
from .cfa import DCFA, dcfa_approves
from .grammar import is_member
from .oracle import naive_parse, reduce_candidates
from .runtime import AsrExplorer, asr_search, psr_parse


@dataclass
class Verdicts:
    member: bool
    psr: bool
    asr: bool
    naive: bool

    @property
    def agree(self) -> bool:
        return self.member == self.psr == self.asr == self.naive


def verdicts(tables: AnalysisTables, members: set, graph, budget: int = 1_000_000) -> Verdicts:
    naive = naive_parse(tables.grammar, graph, budget=budget)
    asr = asr_search(tables, graph, budget)
    if naive.accepted is None or asr.accepted is None:
        raise RuntimeError(f"search budget exceeded on {graph}")
    return Verdicts(is_member(members, graph), bool(psr_parse(tables, graph).accepted),
                    bool(asr.accepted), bool(naive.accepted))


def asr_reductions(dcfa: DCFA, stack) -> set:
    """``(rule, lhs literal)`` for every reduce item of the top state."""
    g = dcfa.grammar
    q, tau = stack.top
    out = set()
    for it in dcfa.states[q].reduce_items(g):
        if it.rule == 0 or not reducible(g, it):
            continue
        mu = {n: tau[p] for n, p in it.sigma}
        out.add((it.rule, g.rules[it.rule].lhs.rename(mu)))
    return out


def naive_reductions(dcfa: DCFA, stack_lits: tuple) -> set:
    """Naive reduce moves on the stack graph whose result the dCFA approves."""
    out = set()
    for i, _, new in reduce_candidates(dcfa.grammar, stack_lits):
        if dcfa_approves(dcfa, new):
            out.add((i, new[-1]))
    return out


@dataclass
class ReduceAgreement:
    configurations: int = 0
    disagreements: list = field(default_factory=list)


def check_reduce_enabling(dcfa: DCFA, graph, report: ReduceAgreement = None) -> ReduceAgreement:
    """Compare both reduce conditions on every ASR configuration for ``graph``."""
    report = report or ReduceAgreement()
    ex = AsrExplorer(dcfa, graph)
    for c in ex.reachable():
        report.configurations += 1
        a = asr_reductions(dcfa, c.stack)
        b = naive_reductions(dcfa, tuple(c.stack.lits))
        if a != b:
            report.disagreements.append((graph, tuple(c.stack.lits), a, b))
    return report
