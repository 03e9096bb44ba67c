"""Parsers driven by the dCFA.

``asr_search`` explores every move the dCFA-assisted shift-reduce parser
could make (it backtracks); ``psr_parse`` is the predictive parser that
picks each move with the trigger order and Follow sets, and never
backtracks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .analysis import AnalysisTables, Trigger, entry_priority, reducible
from .cfa import DCFA, NoTransition, dcfa_run, dcfa_step
from .graph import BULLET, DASH, END, Graph, Literal, PseudoLiteral
from .grammar import HRGrammar
from .results import BudgetExceeded, Reject, finish


# ---------------------------------------------------------------- helpers


def abstract(params, tau: dict, read_nodes, lit: Literal) -> PseudoLiteral:
    """Decision-time view of ``lit`` from a state with binding ``tau``."""
    inv = {x: y for y, x in tau.items() if y in params}
    slots = []
    for n in lit.nodes:
        if n in inv:
            slots.append(inv[n])
        elif n not in read_nodes:
            slots.append(DASH)
        else:
            slots.append(BULLET)
    return PseudoLiteral(lit.label, tuple(slots))


def fits(lit: Literal, pseudo: PseudoLiteral, tau: dict) -> bool:
    if lit.label != pseudo.label or len(lit.nodes) != len(pseudo.slots):
        return False
    for n, s in zip(lit.nodes, pseudo.slots):
        if s in (DASH, BULLET):
            continue
        if tau.get(s) != n:
            return False
    return True


def reduction_match(grammar: HRGrammar, item, tau: dict) -> dict:
    """The match ``tau∘sigma`` of a reduce item, over the bound rule nodes."""
    return {n: tau[p] for n, p in item.sigma}


# ---------------------------------------------------------------- edge index


class _Bucket:
    """Literal ids in canonical order; consumed ids are skipped lazily."""
    __slots__ = ("ids", "pos")

    def __init__(self):
        self.ids = []
        self.pos = 0

    def first(self, consumed) -> Optional[int]:
        ids = self.ids
        while self.pos < len(ids) and consumed[ids[self.pos]]:
            self.pos += 1
        return ids[self.pos] if self.pos < len(ids) else None


class EdgeIndex:
    """Unread literals of an input graph, with constant-time lookups.

    Views: literals per label, per (label, position, node), and per
    (label, positions, nodes) for the multi-parameter patterns named in
    ``patterns``.  Each view lists literals in canonical (label, nodes)
    order so that lookups return the lowest fitting literal.

    A bullet slot only matches a node that has been read and is not bound
    to a parameter.  To find such literals quickly, ``mark_read`` files the
    unread literals at a newly read node under (label, position).
    """

    def __init__(self, graph: Graph, patterns=()):
        order = sorted(range(len(graph.lits)), key=lambda i: graph.lits[i])
        self.lits = graph.lits
        self.consumed = [False] * len(graph.lits)
        self.remaining = len(graph.lits)
        self.read = set()
        self.incident = {n: [] for n in graph.nodes}
        self.by_label = {}
        self.anchor = {}
        self.read_anchor = {}
        self.composite = {p: {} for p in patterns}
        for i in order:
            l = graph.lits[i]
            self.by_label.setdefault(l.label, _Bucket()).ids.append(i)
            for pos, n in enumerate(l.nodes):
                self.incident[n].append(i)
                self.anchor.setdefault((l.label, pos, n), _Bucket()).ids.append(i)
        for (label, positions), view in self.composite.items():
            for i in order:
                l = graph.lits[i]
                if l.label == label:
                    key = tuple(l.nodes[p] for p in positions)
                    view.setdefault(key, _Bucket()).ids.append(i)

    def consume(self, i: int) -> None:
        assert not self.consumed[i]
        self.consumed[i] = True
        self.remaining -= 1

    def mark_read(self, nodes) -> None:
        for n in nodes:
            if n in self.read:
                continue
            self.read.add(n)
            for i in self.incident.get(n, ()):
                if self.consumed[i]:
                    continue
                l = self.lits[i]
                pos = l.nodes.index(n)
                self.read_anchor.setdefault((l.label, pos), _Bucket()).ids.append(i)

    def unread(self) -> list:
        return [i for i, c in enumerate(self.consumed) if not c]

    def unread_incident(self, node) -> list:
        return [i for i in self.incident.get(node, ()) if not self.consumed[i]]

    def lookup(self, pseudo: PseudoLiteral, tau: dict) -> Optional[int]:
        anchored = [(i, tau.get(s)) for i, s in enumerate(pseudo.slots)
                    if s not in (DASH, BULLET)]
        if any(x is None for _, x in anchored):
            return None
        bullets = [i for i, s in enumerate(pseudo.slots) if s == BULLET]
        if not anchored:
            if bullets:
                b = self.read_anchor.get((pseudo.label, bullets[0]))
            else:
                b = self.by_label.get(pseudo.label)
        elif len(anchored) == 1:
            b = self.anchor.get((pseudo.label, anchored[0][0], anchored[0][1]))
        else:
            view = self.composite.get((pseudo.label, tuple(p for p, _ in anchored)))
            if view is None:
                b = self.anchor.get((pseudo.label, anchored[0][0], anchored[0][1]))
                return self._scan(b, pseudo, tau, bullets)
            b = view.get(tuple(x for _, x in anchored))
        if b is None:
            return None
        if not bullets:
            return b.first(self.consumed)
        return self._scan(b, pseudo, tau, bullets)

    def _scan(self, b, pseudo, tau, bullets):
        if b is None or b.first(self.consumed) is None:
            return None
        bound = set(tau.values())
        ids, start = b.ids, b.pos
        live = []
        found = None
        j = start
        while j < len(ids):
            i = ids[j]
            j += 1
            if self.consumed[i]:
                continue
            live.append(i)
            l = self.lits[i]
            if fits(l, pseudo, tau) and all(
                    l.nodes[p] in self.read and l.nodes[p] not in bound for p in bullets):
                found = i
                break
        # pack the surviving ids against the end of the scanned window, so
        # consumed ids are never walked over twice
        b.pos = j - len(live)
        ids[b.pos:j] = live
        return found


def composite_patterns(tables: AnalysisTables) -> set:
    out = set()
    for entries in tables.follow.values():
        for e in entries:
            if e == END:
                continue
            pos = tuple(i for i, s in enumerate(e.slots) if s not in (DASH, BULLET))
            if len(pos) >= 2:
                out.add((e.label, pos))
    return out


def build_edge_index(graph: Graph, tables: AnalysisTables) -> EdgeIndex:
    return EdgeIndex(graph, composite_patterns(tables))


# ---------------------------------------------------------------- ASR moves


class ParseError(ValueError):
    pass


class NodeReuse(ParseError):
    pass


class NoReduceItem(ParseError):
    pass


class NoGotoAfterReduce(ParseError):
    pass


@dataclass
class ParseStack:
    """States ``[(state, binding)]`` interleaved with ``lits`` (one fewer)."""
    states: list
    lits: list

    @classmethod
    def initial(cls) -> "ParseStack":
        return cls([(0, {})], [])

    @property
    def top(self):
        return self.states[-1]

    def graph_nodes(self) -> set:
        out = set()
        for l in self.lits:
            out.update(l.nodes)
        return out

    def copy(self) -> "ParseStack":
        return ParseStack(list(self.states), list(self.lits))

    def key(self) -> tuple:
        return (tuple((q, tuple(sorted(t.items()))) for q, t in self.states), tuple(self.lits))


def asr_shift(dcfa: DCFA, stack: ParseStack, read_nodes, lit: Literal):
    """Shift ``lit``; returns the transition taken.  Mutates ``stack``."""
    q, tau = stack.top
    try:
        t, q2, tau2 = dcfa_step(dcfa, q, tau, read_nodes, lit)
    except NoTransition:
        bound = set(tau.values())
        if any(n in read_nodes and n not in bound for n in lit.nodes):
            raise NodeReuse(f"{lit} reuses a node that was read already") from None
        raise
    stack.lits.append(lit)
    stack.states.append((q2, tau2))
    return t


def asr_reduce(dcfa: DCFA, stack: ParseStack, item):
    """Reduce by a reduce item of the top state; returns ``(rule, match)``."""
    g = dcfa.grammar
    q, tau = stack.top
    if item not in dcfa.states[q].items or not reducible(g, item):
        raise NoReduceItem(f"state {q} has no reduce item {item}")
    rule = g.rules[item.rule]
    mu = reduction_match(g, item, tau)
    a = rule.lhs.rename(mu)
    k = len(rule.rhs.lits)
    if k:
        del stack.states[-k:]
        del stack.lits[-k:]
    r, tau_r = stack.top
    try:
        _, q2, tau2 = dcfa_step(dcfa, r, tau_r, (), a)
    except NoTransition:
        raise NoGotoAfterReduce(f"no goto on {a} from state {r}") from None
    stack.lits.append(a)
    stack.states.append((q2, tau2))
    return item.rule, mu


class _Budget(Exception):
    pass


@dataclass(frozen=True)
class AsrConfig:
    stack: ParseStack
    read: frozenset  # indices of read input literals

    def key(self) -> tuple:
        return self.stack.key(), self.read


class AsrExplorer:
    """All ASR moves on one input, with memoized success search."""

    def __init__(self, dcfa: DCFA, graph: Graph, budget: int = 200_000):
        self.dcfa = dcfa
        self.graph = graph
        self.budget = budget
        self.explored = 0
        self._success = {}
        g = dcfa.grammar
        self.reduce_items = {s.id: [it for it in s.reduce_items(g)
                                    if reducible(g, it) and it.rule != 0]
                             for s in dcfa.states}

    def initial(self) -> AsrConfig:
        return AsrConfig(ParseStack.initial(), frozenset())

    def read_nodes(self, c: AsrConfig) -> set:
        out = set()
        for i in c.read:
            out.update(self.graph.lits[i].nodes)
        return out

    def accepting(self, c: AsrConfig) -> bool:
        return c.stack.top[0] == self.dcfa.accepting and len(c.read) == len(self.graph.lits)

    def shifts(self, c: AsrConfig):
        """Yields ``(literal index, transition, successor)``; equal literals once."""
        read_nodes = self.read_nodes(c)
        tried = set()
        for i, l in enumerate(self.graph.lits):
            if i in c.read or l in tried:
                continue
            tried.add(l)
            s2 = c.stack.copy()
            try:
                t = asr_shift(self.dcfa, s2, read_nodes, l)
            except (NoTransition, NodeReuse):
                continue
            yield i, t, AsrConfig(s2, c.read | {i})

    def reduces(self, c: AsrConfig):
        """Yields ``(item, (rule, match), successor)``."""
        for it in self.reduce_items[c.stack.top[0]]:
            s2 = c.stack.copy()
            try:
                red = asr_reduce(self.dcfa, s2, it)
            except NoGotoAfterReduce:
                continue
            yield it, red, AsrConfig(s2, c.read)

    def successors(self, c: AsrConfig):
        for _, _, c2 in self.shifts(c):
            yield c2, None
        for _, red, c2 in self.reduces(c):
            yield c2, red

    def solve(self, c: AsrConfig):
        """Reductions of some accepting continuation of ``c``, or None."""
        key = c.key()
        if key in self._success:
            return self._success[key]
        self.explored += 1
        if self.explored > self.budget:
            raise _Budget()
        found = None
        if self.accepting(c):
            found = []
        else:
            for c2, red in self.successors(c):
                rest = self.solve(c2)
                if rest is not None:
                    found = ([red] if red else []) + rest
                    break
        self._success[key] = found
        return found

    def succeeds(self, c: AsrConfig) -> bool:
        return self.solve(c) is not None

    def reachable(self):
        """Every configuration reachable from the initial one."""
        seen = {}
        todo = [self.initial()]
        while todo:
            c = todo.pop()
            k = c.key()
            if k in seen:
                continue
            seen[k] = c
            self.explored += 1
            if self.explored > self.budget:
                raise _Budget()
            for c2, _ in self.successors(c):
                todo.append(c2)
        return list(seen.values())


def asr_search(tables_or_dcfa, graph: Graph, budget: int = 200_000):
    """Exhaustive search over all ASR move sequences on ``graph``."""
    dcfa = tables_or_dcfa.dcfa if isinstance(tables_or_dcfa, AnalysisTables) else tables_or_dcfa
    ex = AsrExplorer(dcfa, graph, budget)
    try:
        found = ex.solve(ex.initial())
    except _Budget:
        return BudgetExceeded(ex.explored)
    if found is None:
        return Reject("no ASR move sequence accepts", ex.explored)
    return finish(dcfa.grammar, found, graph, ex.explored, [])


# ---------------------------------------------------------------- PSR


@dataclass
class Selection:
    trigger: Trigger
    literal: Optional[int]  # index into the input, None for the end marker
    entry: object = None


def select_trigger(tables: AnalysisTables, state: int, tau: dict, index: EdgeIndex):
    """Pick the trigger for the next move, and the literal it should shift.

    Returns a ``Selection`` or None when nothing fits.
    """
    for t in tables.order[state]:
        entries = tables.follow[(state, t.ordinal)]
        if index.remaining:
            for e in _sorted_entries(tables, state, t.ordinal):
                if e == END:
                    continue
                i = index.lookup(e, tau)
                if i is not None:
                    return Selection(t, i, e)
        elif END in entries:
            return Selection(t, None, END)
    return None


_ENTRY_CACHE = {}


def _sorted_entries(tables, state, ordinal):
    key = (id(tables), state, ordinal)
    got = _ENTRY_CACHE.get(key)
    if got is None:
        got = sorted(tables.follow[(state, ordinal)], key=entry_priority)
        _ENTRY_CACHE[key] = got
    return got


def psr_parse(tables: AnalysisTables, graph: Graph, trace: bool = False,
              check_every: int = 0) -> object:
    """Predictive parse of ``graph``.

    ``check_every=n`` re-runs the dCFA over the stack graph every n moves
    and raises AssertionError if it is not approved (0 disables the check).
    """
    dcfa = tables.dcfa
    g = dcfa.grammar
    index = build_edge_index(graph, tables)
    stack = ParseStack.initial()
    read_nodes = set()
    reductions = []
    moves = 0
    lines = []
    while True:
        q, tau = stack.top
        if q == dcfa.accepting:
            if index.remaining == 0:
                return finish(g, reductions, graph, moves, lines)
            return Reject("accepting state reached with unread literals", moves, lines,
                          {"state": q, "unread": index.remaining})
        sel = select_trigger(tables, q, tau, index)
        if sel is None:
            return Reject("no trigger fits the rest graph", moves, lines,
                          _diagnose(tables, q, tau, index))
        t = sel.trigger
        if t.is_shift:
            l = graph.lits[sel.literal]
            try:
                asr_shift(dcfa, stack, read_nodes, l)
            except (NoTransition, NodeReuse) as exc:
                return Reject(f"shift of {l} failed: {exc}", moves, lines,
                              {"state": q, "trigger": t.id})
            index.consume(sel.literal)
            index.mark_read(l.nodes)
            read_nodes.update(l.nodes)
            shown = str(l)
        else:
            if t.item.rule == 0:
                return Reject("accept item selected outside the accepting state", moves, lines)
            try:
                reductions.append(asr_reduce(dcfa, stack, t.item))
            except (NoReduceItem, NoGotoAfterReduce) as exc:
                return Reject(str(exc), moves, lines, {"state": q, "trigger": t.id})
            shown = str(stack.lits[-1])
        moves += 1
        if trace:
            lines.append(f"{t.kind} trigger={t.id} lit={shown} state={stack.top[0]}")
        if check_every and moves % check_every == 0:
            if dcfa_run(dcfa, stack.lits) is None:
                raise AssertionError(f"stack graph not approved after move {moves}")


def _diagnose(tables, state, tau, index) -> dict:
    out = {"state": state,
           "binding": ",".join(f"{k}/{v}" for k, v in sorted(tau.items())),
           "unread": index.remaining}
    for t in tables.order[state]:
        entries = sorted(str(e) for e in tables.follow[(state, t.ordinal)])
        out[f"trigger.{t.id}"] = "no literal fits " + " ".join(entries)
    return out
