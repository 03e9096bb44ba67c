"""Characteristic finite automata: the nondeterministic one over dotted rules
and its determinization into states made of items.

An item is a dotted rule together with a parameter mapping that tells which
rule nodes are already bound, and to which parameter of the state.  States
are closed item sets; two item sets that differ only by a renaming of
their parameters are the same state.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

from .graph import DASH, Graph, Literal, PseudoLiteral
from .grammar import HRGrammar


def param_name(i: int) -> str:
    if i < 26:
        return chr(ord("a") + i)
    return f"p{i}"


def rule_node_order(grammar: HRGrammar, rule_index: int) -> tuple:
    """Rule nodes in order of first occurrence: lhs, rhs literals, isolated."""
    r = grammar.rules[rule_index]
    seen = {}
    for n in r.lhs.nodes:
        seen.setdefault(n, None)
    for l in r.rhs.lits:
        for n in l.nodes:
            seen.setdefault(n, None)
    for n in sorted(r.rhs.nodes):
        seen.setdefault(n, None)
    return tuple(seen)


class Item(NamedTuple):
    rule: int
    dot: int
    sigma: tuple  # sorted ((rule node, parameter), ...)

    def mapping(self) -> dict:
        return dict(self.sigma)


def make_item(rule: int, dot: int, sigma) -> Item:
    return Item(rule, dot, tuple(sorted(dict(sigma).items())))


def next_literal(grammar: HRGrammar, rule: int, dot: int) -> Optional[Literal]:
    lits = grammar.rules[rule].rhs.lits
    return lits[dot] if dot < len(lits) else None


def pseudo_image(l: Literal, sigma: dict) -> PseudoLiteral:
    return PseudoLiteral(l.label, tuple(sigma.get(n, DASH) for n in l.nodes))


def format_item(grammar: HRGrammar, item: Item) -> str:
    r = grammar.rules[item.rule]
    lits = [str(l) for l in r.rhs.lits]
    lits.insert(item.dot, ".")
    order = rule_node_order(grammar, item.rule)
    sig = item.mapping()
    binding = ",".join(f"{n}/{sig[n]}" for n in order if n in sig)
    return f"{r.lhs} -> {' '.join(lits)} [{binding}]"


def format_dotted(grammar: HRGrammar, rule: int, dot: int) -> str:
    r = grammar.rules[rule]
    lits = [str(l) for l in r.rhs.lits]
    lits.insert(dot, ".")
    return f"{r.lhs} -> {' '.join(lits)}"


# ---------------------------------------------------------------- nCFA


@dataclass
class NCFA:
    grammar: HRGrammar
    states: list  # (rule, dot)
    goto: list  # ((rule, dot), literal, (rule, dot + 1))
    closure: list  # ((rule, dot), (rule', 0))

    @property
    def q0(self):
        return (0, 0)


def build_ncfa(grammar: HRGrammar) -> NCFA:
    states = []
    goto = []
    closure = []
    for i, r in enumerate(grammar.rules):
        for d in range(len(r.rhs.lits) + 1):
            states.append((i, d))
            if d < len(r.rhs.lits):
                l = r.rhs.lits[d]
                goto.append(((i, d), l, (i, d + 1)))
                if not grammar.is_terminal(l.label):
                    for j in grammar.by_lhs.get(l.label, ()):
                        closure.append(((i, d), (j, 0)))
    return NCFA(grammar, states, goto, closure)


def _closure_targets(grammar: HRGrammar, rule: int, dot: int, mu: dict):
    l = next_literal(grammar, rule, dot)
    if l is None or grammar.is_terminal(l.label):
        return
    for j in grammar.by_lhs.get(l.label, ()):
        lhs = grammar.rules[j].lhs
        nu = {c: mu[b] for b, c in zip(l.nodes, lhs.nodes) if b in mu}
        yield j, nu


def ncfa_run(ncfa: NCFA, phi: Sequence[Literal], want_witness: bool = False):
    """Search for a move sequence approving ``phi``.

    Returns ``(approved, moves)``; ``moves`` lists ("closure"|"goto", state)
    pairs when a witness was requested and found.
    """
    g = ncfa.grammar
    phi = tuple(phi)
    prefix_nodes = [set()]
    for l in phi:
        prefix_nodes.append(prefix_nodes[-1] | set(l.nodes))
    start = (0, 0, (), 0)
    parent = {start: None}
    queue = deque([start])
    while queue:
        conf = queue.popleft()
        rule, dot, mu_t, k = conf
        if k == len(phi):
            moves = []
            if want_witness:
                c = conf
                while parent[c] is not None:
                    prev, kind = parent[c]
                    moves.append((kind, (c[0], c[1])))
                    c = prev
                moves.reverse()
            return True, moves
        mu = dict(mu_t)
        for j, nu in _closure_targets(g, rule, dot, mu):
            nxt = (j, 0, tuple(sorted(nu.items())), k)
            if nxt not in parent:
                parent[nxt] = (conf, "closure")
                queue.append(nxt)
        l = next_literal(g, rule, dot)
        if l is None:
            continue
        target = phi[k]
        if target.label != l.label:
            continue
        nu = dict(mu)
        used = set(mu.values())
        ok = True
        for n, x in zip(l.nodes, target.nodes):
            if n in mu:
                if mu[n] != x:
                    ok = False
                    break
            else:
                if x in prefix_nodes[k] or x in used:
                    ok = False
                    break
                nu[n] = x
                used.add(x)
        if not ok:
            continue
        nxt = (rule, dot + 1, tuple(sorted(nu.items())), k + 1)
        if nxt not in parent:
            parent[nxt] = (conf, "goto")
            queue.append(nxt)
    return False, []


def ncfa_approves(ncfa: NCFA, phi) -> bool:
    lits = phi.lits if isinstance(phi, Graph) else phi
    return ncfa_run(ncfa, lits)[0]


# ---------------------------------------------------------------- items


def close_items(grammar: HRGrammar, items: Iterable[Item]) -> frozenset:
    out = set(items)
    todo = list(out)
    while todo:
        it = todo.pop()
        for j, tau in _closure_targets(grammar, it.rule, it.dot, it.mapping()):
            new = make_item(j, 0, tau)
            if new not in out:
                out.add(new)
                todo.append(new)
    return frozenset(out)


def item_params(items: Iterable[Item]) -> set:
    return {p for it in items for _, p in it.sigma}


def _shape(items) -> tuple:
    return tuple(sorted((it.rule, it.dot, len(it.sigma)) for it in items))


def states_equivalent(a: Iterable[Item], b: Iterable[Item]) -> Optional[dict]:
    """A parameter renaming ``m`` with ``a^m = b``, or None."""
    a = sorted(a)
    b = list(b)
    if _shape(a) != _shape(b):
        return None
    by_key = {}
    for it in b:
        by_key.setdefault((it.rule, it.dot), []).append(it)
    used = set()

    def extend(i, fwd, back):
        if i == len(a):
            return dict(fwd)
        it = a[i]
        for cand in by_key[(it.rule, it.dot)]:
            if cand in used:
                continue
            sa = it.mapping()
            sb = cand.mapping()
            if sa.keys() != sb.keys():
                continue
            f2, b2 = dict(fwd), dict(back)
            ok = True
            for n, p in sa.items():
                q = sb[n]
                if f2.setdefault(p, q) != q or b2.setdefault(q, p) != p:
                    ok = False
                    break
            if not ok:
                continue
            used.add(cand)
            res = extend(i + 1, f2, b2)
            if res is not None:
                return res
            used.discard(cand)
        return None

    return extend(0, {}, {})


def rename_items(items: Iterable[Item], m: dict) -> frozenset:
    return frozenset(Item(it.rule, it.dot, tuple((n, m.get(p, p)) for n, p in it.sigma))
                     for it in items)


def _display_order(grammar: HRGrammar, items) -> list:
    """Most advanced items first; this fixes how parameters get named."""
    return sorted(items, key=lambda it: (-it.dot, it.rule, it.sigma))


def canonical_naming(grammar: HRGrammar, items) -> dict:
    """Rename parameters to a, b, c, ... in first-occurrence order."""
    names = {}
    for it in _display_order(grammar, items):
        sig = it.mapping()
        for n in rule_node_order(grammar, it.rule):
            if n in sig and sig[n] not in names:
                names[sig[n]] = param_name(len(names))
    return names


# ---------------------------------------------------------------- dCFA


@dataclass
class DState:
    id: int
    items: frozenset
    params: tuple
    shape: tuple = field(repr=False, default=())

    def sorted_items(self, grammar: HRGrammar) -> list:
        return _display_order(grammar, self.items)

    def reduce_items(self, grammar: HRGrammar) -> list:
        return [it for it in self.sorted_items(grammar)
                if it.dot == len(grammar.rules[it.rule].rhs.lits)]


@dataclass
class DTransition:
    id: int
    src: int
    lit: Literal  # over params(src) and fresh nodes
    mu: dict  # params(dst) -> params(src) ∪ nodes of lit
    dst: int
    leave: PseudoLiteral

    def fresh(self, src_params) -> list:
        return [(i, n) for i, n in enumerate(self.lit.nodes) if n not in src_params]


@dataclass
class DCFA:
    grammar: HRGrammar
    states: list
    transitions: list
    accepting: int
    out: dict = field(default_factory=dict)  # state -> [transition]
    incoming: dict = field(default_factory=dict)

    def transitions_from(self, s: int) -> list:
        return self.out.get(s, [])

    def transition_on(self, s: int, leave: PseudoLiteral) -> Optional[DTransition]:
        for t in self.out.get(s, ()):
            if t.leave == leave:
                return t
        return None

    def counts(self) -> dict:
        """Automaton sizes.

        ``states``/``items``/``transitions`` leave out what the added rule
        ``Start() -> Z()`` contributes: its two items, the accepting state
        and the transition into it.  The ``all_`` entries count everything.
        """
        aug_items = sum(1 for s in self.states for it in s.items if it.rule == 0)
        into_accept = sum(1 for t in self.transitions if t.dst == self.accepting)
        return {
            "states": len(self.states) - 1,
            "items": sum(len(s.items) for s in self.states) - aug_items,
            "transitions": len(self.transitions) - into_accept,
            "all_states": len(self.states),
            "all_items": sum(len(s.items) for s in self.states),
            "all_transitions": len(self.transitions),
        }


def leave(grammar: HRGrammar, items: Iterable[Item]) -> list:
    out = {}
    for it in _display_order(grammar, items):
        l = next_literal(grammar, it.rule, it.dot)
        if l is not None:
            out.setdefault(pseudo_image(l, it.mapping()), None)
    return list(out)


def _advance(grammar: HRGrammar, items, pl: PseudoLiteral, e: Literal) -> set:
    """Items after moving the dot over a literal whose image is ``pl``."""
    out = set()
    for it in items:
        l = next_literal(grammar, it.rule, it.dot)
        if l is None:
            continue
        sig = it.mapping()
        if pseudo_image(l, sig) != pl:
            continue
        nu = dict(sig)
        for n, x in zip(l.nodes, e.nodes):
            nu[n] = x
        out.add(make_item(it.rule, it.dot + 1, nu))
    return out


def build_dcfa(grammar: HRGrammar) -> DCFA:
    q0_items = close_items(grammar, [make_item(0, 0, {})])
    states = [DState(0, q0_items, (), _shape(q0_items))]
    transitions = []
    work = deque([0])
    while work:
        s = states[work.popleft()]
        spar = set(s.params)
        for pl in leave(grammar, s.items):
            k = len(s.params)
            nodes = []
            for slot in pl.slots:
                if slot == DASH:
                    nodes.append(param_name(k))
                    k += 1
                else:
                    nodes.append(slot)
            e = Literal(pl.label, tuple(nodes))
            new_items = close_items(grammar, _advance(grammar, s.items, pl, e))
            shape = _shape(new_items)
            target, mu = None, None
            for q in states:
                if q.shape != shape:
                    continue
                m = states_equivalent(q.items, new_items)
                if m is not None:
                    target, mu = q, m
                    break
            if target is None:
                names = canonical_naming(grammar, new_items)
                items = rename_items(new_items, names)
                target = DState(len(states), items,
                                tuple(param_name(i) for i in range(len(names))), shape)
                states.append(target)
                work.append(target.id)
                mu = {v: k2 for k2, v in names.items()}
            assert all(v in spar or v in e.nodes for v in mu.values())
            transitions.append(DTransition(len(transitions), s.id, e, mu, target.id, pl))
    accepting = None
    acc_items = frozenset([make_item(0, 1, {})])
    for q in states:
        if q.items == acc_items:
            accepting = q.id
    assert accepting is not None
    d = DCFA(grammar, states, transitions, accepting)
    for t in transitions:
        d.out.setdefault(t.src, []).append(t)
        d.incoming.setdefault(t.dst, []).append(t)
    return d


class NoTransition(ValueError):
    pass


def dcfa_step(dcfa: DCFA, state: int, tau: dict, read_nodes, lit: Literal):
    """One dCFA move; returns ``(transition, next_state, next_binding)``.

    ``read_nodes`` are the nodes of the graph approved so far.
    """
    params = dcfa.states[state].params
    found = None
    for t in dcfa.out.get(state, ()):
        if t.lit.label != lit.label:
            continue
        nu = dict(tau)
        ok = True
        bound = set(tau.values())
        for n, x in zip(t.lit.nodes, lit.nodes):
            if n in params:
                if tau.get(n) != x:
                    ok = False
                    break
            else:
                if x in read_nodes or x in bound:
                    ok = False
                    break
                nu[n] = x
                bound.add(x)
        if not ok:
            continue
        if found is not None:
            raise AssertionError(f"two transitions of state {state} apply to {lit}")
        found = (t, t.dst, {q: nu[m] for q, m in t.mu.items()})
    if found is None:
        raise NoTransition(f"state {state} has no transition for {lit}")
    return found


def dcfa_run(dcfa: DCFA, lits: Sequence[Literal]):
    """Run the dCFA over ``lits``; returns ``(state, binding)`` or None."""
    state, tau = 0, {}
    read = set()
    for l in lits:
        try:
            _, state, tau = dcfa_step(dcfa, state, tau, read, l)
        except NoTransition:
            return None
        read.update(l.nodes)
    return state, tau


def dcfa_approves(dcfa: DCFA, phi) -> bool:
    lits = phi.lits if isinstance(phi, Graph) else phi
    return dcfa_run(dcfa, lits) is not None


def format_transition(t: DTransition) -> str:
    mu = ",".join(f"{q}/{m}" for q, m in sorted(t.mu.items()))
    return f"{t.src} --{t.lit} [{mu}]--> {t.dst}"
