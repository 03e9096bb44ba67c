"""Checking the free edge choice property.

Verdicts: ``holds`` (no violation found), ``assumed`` (the caller vouches
for it), ``refuted`` (with a witness configuration) and ``unknown``.

The dynamic check enumerates small language graphs, walks every
configuration the ASR parser can reach on them, and wherever an accepting
continuation still exists asks SelectTrigger for its choice.  The choice
must be abstracted into the chosen trigger's Follow set, and for a shift it
must lead to acceptance whenever another literal for the same transition
does.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .analysis import AnalysisTables
from .graph import BULLET, END
from .grammar import enumerate_language
from .runtime import (AsrConfig, AsrExplorer, EdgeIndex, _Budget, abstract, composite_patterns,
                      fits, select_trigger)

HOLDS = "holds"
ASSUMED = "assumed"
REFUTED = "refuted"
UNKNOWN = "unknown"


@dataclass
class FecVerdict:
    verdict: str
    witness: dict = field(default_factory=dict)
    checked: int = 0  # configurations examined

    @property
    def yes(self) -> bool:
        return self.verdict in (HOLDS, ASSUMED)

    def short(self) -> str:
        return {HOLDS: "yes", ASSUMED: "yes", REFUTED: "no"}.get(self.verdict, "unknown")


def _index_for(tables: AnalysisTables, ex: AsrExplorer, c: AsrConfig) -> EdgeIndex:
    index = EdgeIndex(ex.graph, composite_patterns(tables))
    for i in c.read:
        index.consume(i)
    index.mark_read(ex.read_nodes(c))
    return index


def _describe(ex: AsrExplorer, c: AsrConfig) -> dict:
    q, tau = c.stack.top
    return {
        "input": " ".join(map(str, ex.graph.lits)),
        "stack": " ".join(map(str, c.stack.lits)) or "-",
        "state": q,
        "binding": ",".join(f"{k}/{v}" for k, v in sorted(tau.items())) or "-",
    }


def check_configuration(tables: AnalysisTables, ex: AsrExplorer, c: AsrConfig):
    """None if SelectTrigger's answer at ``c`` is useful, else a witness dict.

    Only configurations with unread literals and an accepting continuation
    are judged.
    """
    if len(c.read) == len(ex.graph.lits) or not ex.succeeds(c):
        return None
    q, tau = c.stack.top
    index = _index_for(tables, ex, c)
    sel = select_trigger(tables, q, tau, index)
    if sel is None:
        w = _describe(ex, c)
        w["reason"] = "no trigger selected although the parse can still succeed"
        return w
    t = sel.trigger
    lit = ex.graph.lits[sel.literal]
    params = tables.dcfa.states[q].params
    image = abstract(params, tau, ex.read_nodes(c), lit)
    if image not in tables.follow[(q, t.ordinal)]:
        w = _describe(ex, c)
        w.update(reason="selected literal is not abstracted into Follow",
                 trigger=t.id, literal=str(lit), image=str(image))
        return w
    if t.is_shift:
        good = bad = None
        for i, tr, c2 in ex.shifts(c):
            if tr.id != t.transition.id:
                continue
            if ex.succeeds(c2):
                good = good or ex.graph.lits[i]
            if i == sel.literal or ex.graph.lits[i] == lit:
                bad = not ex.succeeds(c2)
        if good is not None and bad:
            w = _describe(ex, c)
            w.update(reason="selected literal leads to rejection, another one does not",
                     trigger=t.id, literal=str(lit), alternative=str(good))
            return w
    return None


def check_fec_dynamic(tables: AnalysisTables, max_lits: int = 5, max_nodes: int = None,
                      inputs=None, budget: int = 200_000) -> FecVerdict:
    grammar = tables.grammar
    if inputs is None:
        inputs = enumerate_language(grammar, max_lits, max_nodes)
    checked = 0
    for g in inputs:
        ex = AsrExplorer(tables.dcfa, g, budget)
        try:
            if not ex.succeeds(ex.initial()):
                return FecVerdict(UNKNOWN, {
                    "reason": "the ASR parser cannot accept a member of the language",
                    "input": " ".join(map(str, g.lits)) or "-"}, checked)
            configs = ex.reachable()
            for c in configs:
                checked += 1
                w = check_configuration(tables, ex, c)
                if w is not None:
                    return FecVerdict(REFUTED, w, checked)
        except _Budget:
            return FecVerdict(UNKNOWN, {"reason": "search budget exceeded",
                                        "input": " ".join(map(str, g.lits))}, checked)
    return FecVerdict(HOLDS, {}, checked)


def check_fec_static(tables: AnalysisTables, max_lits: int = 4) -> FecVerdict:
    """Conservative test: holds only if no shift Follow entry has a BULLET slot
    and, in bounded simulation, no selected Follow entry is ever fitted by two
    distinct unread literals.  Otherwise unknown."""
    for (s, o), entries in tables.follow.items():
        t = tables.trigger(s, o)
        if t.is_shift and any(e != END and BULLET in e.slots for e in entries):
            return FecVerdict(UNKNOWN, {"reason": f"trigger {t.id} follows a bullet entry"})
    checked = 0
    for g in enumerate_language(tables.grammar, max_lits):
        ex = AsrExplorer(tables.dcfa, g)
        try:
            if not ex.succeeds(ex.initial()):
                return FecVerdict(UNKNOWN, {
                    "reason": "the ASR parser cannot accept a member of the language",
                    "input": " ".join(map(str, g.lits)) or "-"}, checked)
            configs = ex.reachable()
        except _Budget:
            return FecVerdict(UNKNOWN, {"reason": "search budget exceeded"}, checked)
        for c in configs:
            if len(c.read) == len(g.lits):
                continue
            checked += 1
            q, tau = c.stack.top
            sel = select_trigger(tables, q, tau, _index_for(tables, ex, c))
            if sel is None or not sel.trigger.is_shift:
                continue
            fitting = {g.lits[i] for i in range(len(g.lits))
                       if i not in c.read and fits(g.lits[i], sel.entry, tau)}
            if len(fitting) > 1:
                w = _describe(ex, c)
                w.update(reason="several literals fit the selected entry", entry=str(sel.entry))
                return FecVerdict(UNKNOWN, w, checked)
    return FecVerdict(HOLDS, {}, checked)


def check_fec(tables: AnalysisTables, mode: str = "auto", **bounds) -> FecVerdict:
    """``mode`` is one of static, dynamic, assume, auto (static, then dynamic)."""
    if mode == "assume":
        return FecVerdict(ASSUMED)
    if mode == "static":
        return check_fec_static(tables)
    if mode == "dynamic":
        return check_fec_dynamic(tables, **bounds)
    if mode == "auto":
        v = check_fec_static(tables)
        return v if v.verdict == HOLDS else check_fec_dynamic(tables, **bounds)
    raise ValueError(f"unknown mode {mode!r}")
