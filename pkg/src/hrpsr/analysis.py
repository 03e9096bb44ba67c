"""Static analysis over the dCFA: triggers, Follow and Follow* sets, the
precedes relation, conflicts and the trigger order used by the predictive
parser.

Follow entries are pseudo-literals whose slots are parameters of the state
the trigger belongs to, DASH (node not read when the decision is made) or
BULLET (node read, but not tracked by the state), or the end marker.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from .cfa import DCFA, DTransition, Item, make_item, pseudo_image
from .graph import BULLET, DASH, END, PseudoLiteral


class ConflictPresent(ValueError):
    pass


@dataclass(frozen=True)
class Trigger:
    state: int
    ordinal: int  # position among the state's triggers, used for tie-breaks
    kind: str  # "shift" or "reduce"
    transition: Optional[DTransition] = field(default=None, compare=False, hash=False)
    item: Optional[Item] = field(default=None, compare=False, hash=False)

    @property
    def id(self) -> str:
        return f"{self.state}.{self.ordinal}"

    @property
    def is_shift(self) -> bool:
        return self.kind == "shift"

    def describe(self, grammar) -> str:
        if self.is_shift:
            return f"shift {self.transition.lit}"
        if self.item.rule == 0:
            return "accept"
        return f"reduce {grammar.rule_name(self.item.rule)}"


def reducible(grammar, item: Item) -> bool:
    r = grammar.rules[item.rule]
    if item.dot != len(r.rhs.lits):
        return False
    # an empty right-hand side whose lhs nodes are still unbound cannot be
    # reduced: the nonterminal literal to push would have no nodes
    return all(n in item.mapping() for n in r.lhs.nodes)


def state_triggers(dcfa: DCFA, state: int) -> list:
    g = dcfa.grammar
    out = []
    for t in dcfa.transitions_from(state):
        if g.is_terminal(t.lit.label):
            out.append(Trigger(state, len(out), "shift", transition=t))
    for it in dcfa.states[state].sorted_items(g):
        if reducible(g, it):
            out.append(Trigger(state, len(out), "reduce", item=it))
    return out


def _translate(entry, mapping: dict):
    """Rewrite an entry's parameter slots; unmapped parameters become BULLET."""
    if entry == END:
        return END
    return PseudoLiteral(entry.label, tuple(
        s if s in (DASH, BULLET) else mapping.get(s, BULLET) for s in entry.slots))


@dataclass
class ReturnContext:
    """Where a reduction may return to.

    ``below`` is the state exposed after popping the right-hand side, ``goto``
    the nonterminal transition taken from it, and ``mapping`` sends parameters
    of ``goto.dst`` to parameters of the reducing state (absent = BULLET).
    """
    below: int
    goto: DTransition
    mapping: dict


def return_contexts(dcfa: DCFA, state: int, item: Item) -> list:
    g = dcfa.grammar
    rule = g.rules[item.rule]
    params = dcfa.states[state].params
    out = []

    # walk back over |rhs| incoming transitions, tracking which parameter of
    # the current state each parameter of ``state`` came from (None = bound
    # on the way, i.e. by a node that was fresh at that transition)
    def walk(cur, it, origin, steps):
        if steps == 0:
            lhs_image = pseudo_image(rule.lhs, it.mapping())
            goto = dcfa.transition_on(cur, lhs_image)
            if goto is None:
                raise AssertionError(f"state {cur} has no transition on {lhs_image}")
            back = {o: p for p, o in origin.items() if o is not None}
            sig = item.mapping()
            mapping = {}
            src_params = set(dcfa.states[cur].params)
            for q, m in goto.mu.items():
                if m in src_params:
                    if m in back:
                        mapping[q] = back[m]
                else:
                    pos = goto.lit.nodes.index(m)
                    mapping[q] = sig[rule.lhs.nodes[pos]]
            out.append(ReturnContext(cur, goto, mapping))
            return
        lit = rule.rhs.lits[it.dot - 1]
        for t in dcfa.incoming.get(cur, ()):
            src_params = set(dcfa.states[t.src].params)
            prev = {n: t.mu[p] for n, p in it.sigma if t.mu[p] in src_params}
            pred = make_item(it.rule, it.dot - 1, prev)
            if pred not in dcfa.states[t.src].items:
                continue
            if pseudo_image(lit, prev) != t.leave:
                continue
            nxt = {p: (t.mu[o] if o is not None and t.mu[o] in src_params else None)
                   for p, o in origin.items()}
            walk(t.src, pred, nxt, steps - 1)

    walk(state, item, {p: p for p in params}, len(rule.rhs.lits))
    return out


@dataclass
class AnalysisTables:
    dcfa: DCFA
    triggers: dict  # state -> [Trigger]
    follow: dict  # (state, ordinal) -> frozenset of entries
    follow_star: dict
    contexts: dict  # (state, ordinal) -> [ReturnContext]
    precedes: dict  # state -> nx.DiGraph over ordinals
    conflicts: list  # [(state, frozenset of ordinals)]
    cycles: list  # [(state, [ordinals])]
    order: dict  # state -> [Trigger]

    @property
    def grammar(self):
        return self.dcfa.grammar

    @property
    def conflict_free(self) -> bool:
        return not self.conflicts

    def trigger(self, state: int, ordinal: int) -> Trigger:
        return self.triggers[state][ordinal]


def _fixpoint(dcfa, triggers, contexts, seed, forward):
    sets = {k: set(v) for k, v in seed.items()}
    changed = True
    while changed:
        changed = False
        for s, ts in triggers.items():
            for t in ts:
                key = (s, t.ordinal)
                acc = sets[key]
                before = len(acc)
                if t.is_shift:
                    if forward:
                        tr = t.transition
                        src = set(dcfa.states[s].params)
                        fwd = {q: m for q, m in tr.mu.items() if m in src}
                        for t2 in triggers[tr.dst]:
                            for e in list(sets[(tr.dst, t2.ordinal)]):
                                if e == END:
                                    continue
                                acc.add(PseudoLiteral(e.label, tuple(
                                    s2 if s2 in (DASH, BULLET) else fwd.get(s2, DASH)
                                    for s2 in e.slots)))
                elif t.item.rule == 0:
                    acc.add(END)
                else:
                    for ctx in contexts[key]:
                        dst = ctx.goto.dst
                        for t2 in triggers[dst]:
                            for e in list(sets[(dst, t2.ordinal)]):
                                acc.add(_translate(e, ctx.mapping))
                if len(acc) != before:
                    changed = True
    return {k: frozenset(v) for k, v in sets.items()}


def compute_follow(dcfa: DCFA, triggers: dict = None, contexts: dict = None) -> dict:
    triggers = triggers or {s.id: state_triggers(dcfa, s.id) for s in dcfa.states}
    contexts = contexts or _all_contexts(dcfa, triggers)
    seed = {}
    for s, ts in triggers.items():
        params = set(dcfa.states[s].params)
        for t in ts:
            if t.is_shift:
                l = t.transition.lit
                seed[(s, t.ordinal)] = {PseudoLiteral(
                    l.label, tuple(n if n in params else DASH for n in l.nodes))}
            else:
                seed[(s, t.ordinal)] = set()
    return _fixpoint(dcfa, triggers, contexts, seed, forward=False)


def compute_follow_star(dcfa: DCFA, follow: dict, triggers: dict = None,
                        contexts: dict = None) -> dict:
    triggers = triggers or {s.id: state_triggers(dcfa, s.id) for s in dcfa.states}
    contexts = contexts or _all_contexts(dcfa, triggers)
    return _fixpoint(dcfa, triggers, contexts, follow, forward=True)


def _all_contexts(dcfa, triggers) -> dict:
    out = {}
    for s, ts in triggers.items():
        for t in ts:
            if not t.is_shift and t.item.rule != 0:
                out[(s, t.ordinal)] = return_contexts(dcfa, s, t.item)
            else:
                out[(s, t.ordinal)] = []
    return out


def precedes_graph(triggers: list, follow: dict, follow_star: dict) -> nx.DiGraph:
    """Edge t -> t' when t must be tried before t'."""
    dg = nx.DiGraph()
    for t in triggers:
        dg.add_node(t.ordinal)
    for t in triggers:
        for u in triggers:
            if t is u:
                continue
            if follow_star[(t.state, t.ordinal)] & follow[(u.state, u.ordinal)]:
                dg.add_edge(t.ordinal, u.ordinal)
    return dg


def find_conflicts(precedes: dict) -> tuple:
    """Elementary cycles of each state's precedes graph.

    Returns ``(conflicting_sets, cycles)``; a set is reported once even when
    several cycles run through exactly the same triggers.
    """
    sets = []
    cycles = []
    for s in sorted(precedes):
        seen = set()
        for cyc in nx.simple_cycles(precedes[s]):
            c = sorted(cyc)
            cycles.append((s, c))
            key = frozenset(c)
            if key not in seen:
                seen.add(key)
                sets.append((s, key))
    return sets, cycles


def entry_priority(entry) -> tuple:
    """Scan order inside one Follow set: entries pinning more parameters
    first, bullet slots (which fit any read node) last, the end marker at
    the end."""
    if entry == END:
        return (2, 0, 0, "")
    pinned = sum(1 for s in entry.slots if s not in (DASH, BULLET))
    bullets = sum(1 for s in entry.slots if s == BULLET)
    return (1 if bullets else 0, -pinned, bullets, str(entry))


def trigger_priority(t: Trigger, follow: dict) -> tuple:
    """Tie-break among unordered triggers: the one whose most specific
    Follow entry pins more nodes goes first, then by ordinal."""
    entries = follow.get((t.state, t.ordinal), ())
    best = min((entry_priority(e)[:3] for e in entries), default=(3, 0, 0))
    return best + (t.ordinal,)


def order_triggers(triggers: list, dg: nx.DiGraph, strict: bool = True,
                   follow: dict = None) -> list:
    """Topological order of the precedes graph.

    Ties go to the trigger with the more specific Follow entries (when
    ``follow`` is given), then to the lower ordinal.  With ``strict=False``
    cycles are tolerated: strongly connected components are ordered
    topologically and their members by the same tie-break.
    """
    by_ord = {t.ordinal: t for t in triggers}
    follow = follow or {}
    prio = {t.ordinal: trigger_priority(t, follow) for t in triggers}
    if nx.is_directed_acyclic_graph(dg):
        return [by_ord[o] for o in nx.lexicographical_topological_sort(dg, key=prio.get)]
    if strict:
        raise ConflictPresent(f"state {triggers[0].state} has a precedes cycle")
    cond = nx.condensation(dg)
    members = cond.graph["mapping"]
    comps = {}
    for o, c in members.items():
        comps.setdefault(c, []).append(o)
    key = {c: min(prio[o] for o in os) for c, os in comps.items()}
    out = []
    for c in nx.lexicographical_topological_sort(cond, key=key.get):
        out.extend(by_ord[o] for o in sorted(comps[c], key=prio.get))
    return out


def analyze(dcfa: DCFA) -> AnalysisTables:
    triggers = {s.id: state_triggers(dcfa, s.id) for s in dcfa.states}
    contexts = _all_contexts(dcfa, triggers)
    follow = compute_follow(dcfa, triggers, contexts)
    follow_star = compute_follow_star(dcfa, follow, triggers, contexts)
    precedes = {s: precedes_graph(ts, follow, follow_star) for s, ts in triggers.items()}
    conflicts, cycles = find_conflicts(precedes)
    order = {s: order_triggers(ts, precedes[s], strict=False, follow=follow)
             for s, ts in triggers.items()}
    return AnalysisTables(dcfa, triggers, follow, follow_star, contexts, precedes,
                          conflicts, cycles, order)


def order_is_valid(tables: AnalysisTables, state: int) -> bool:
    """i < j implies Follow(t_i) and Follow*(t_j) are disjoint."""
    seq = tables.order[state]
    for i, ti in enumerate(seq):
        for tj in seq[i + 1:]:
            if tables.follow[(state, ti.ordinal)] & tables.follow_star[(state, tj.ordinal)]:
                return False
    return True


def _slot_rank(s) -> int:
    return 2 if s == DASH else 1 if s == BULLET else 0


def format_entries(entries) -> str:
    """Entries grouped by label; parameters sort before bullets, bullets before dashes."""
    def key(e):
        if e == END:
            return (1, "", (), "")
        return (0, e.label, tuple(_slot_rank(s) for s in e.slots), str(e))
    return "{" + ", ".join(str(e) for e in sorted(entries, key=key)) + "}"


def entry_params(entry) -> int:
    if entry == END:
        return 0
    return sum(1 for s in entry.slots if s not in (DASH, BULLET))
