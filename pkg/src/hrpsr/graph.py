"""Literals, graphs, renamings and pseudo-literals.

Nodes are plain strings.  A graph is a node set together with an ordered
sequence of literals; two graphs are equivalent when they have the same
node set and their literal sequences are permutations of each other.
"""
from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

FRESH_PREFIX = "%n"

# slot markers for pseudo-literals
DASH = "_"  # node not read yet
BULLET = "*"  # node read, but not tracked by the current state
END = "$"

_NODE_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_']*$")


class GraphError(ValueError):
    pass


class RenamingError(GraphError):
    pass


def valid_node_name(name: str) -> bool:
    return bool(_NODE_RE.match(name))


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    terminal: bool

    def __str__(self):
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True, order=True)
class Literal:
    label: str
    nodes: tuple

    def __post_init__(self):
        if not isinstance(self.nodes, tuple):
            object.__setattr__(self, "nodes", tuple(self.nodes))
        if len(set(self.nodes)) != len(self.nodes):
            raise GraphError(f"literal {self} attaches a node twice")
        object.__setattr__(self, "_hash", hash((self.label, self.nodes)))

    def __hash__(self):
        return self._hash

    def rename(self, mapping: Mapping[str, str]) -> "Literal":
        return Literal(self.label, tuple(mapping.get(n, n) for n in self.nodes))

    def __str__(self):
        return f"{self.label}({','.join(self.nodes)})"

    __repr__ = __str__


def lit(text: str) -> Literal:
    """Shorthand for tests and examples: ``lit("e(1,2)")``."""
    m = re.fullmatch(r"\s*([^\s(]+)\((.*)\)\s*", text)
    if not m:
        raise GraphError(f"bad literal {text!r}")
    args = [a.strip() for a in m.group(2).split(",") if a.strip()]
    return Literal(m.group(1), tuple(args))


@dataclass(frozen=True)
class Graph:
    nodes: frozenset
    lits: tuple

    def __post_init__(self):
        if not isinstance(self.nodes, frozenset):
            object.__setattr__(self, "nodes", frozenset(self.nodes))
        if not isinstance(self.lits, tuple):
            object.__setattr__(self, "lits", tuple(self.lits))
        for l in self.lits:
            for n in l.nodes:
                if n not in self.nodes:
                    raise GraphError(f"node {n} of {l} missing from node set")

    @classmethod
    def of(cls, lits: Iterable[Literal] = (), nodes: Iterable[str] = ()) -> "Graph":
        lits = tuple(lits)
        ns = set(nodes)
        for l in lits:
            ns.update(l.nodes)
        return cls(frozenset(ns), lits)

    @classmethod
    def parse(cls, text: str, nodes: Iterable[str] = ()) -> "Graph":
        """``Graph.parse("root(1) e(1,2)")``; whitespace separated terms."""
        terms = re.findall(r"[^\s()]+\([^)]*\)", text)
        return cls.of([lit(t) for t in terms], nodes)

    def literal_nodes(self) -> set:
        out = set()
        for l in self.lits:
            out.update(l.nodes)
        return out

    def isolated(self) -> frozenset:
        return self.nodes - self.literal_nodes()

    def __len__(self):
        return len(self.lits)

    def __str__(self):
        body = " ".join(map(str, self.lits)) or "ε"
        iso = sorted(self.isolated())
        if iso:
            body += " [" + ",".join(iso) + "]"
        return body

    __repr__ = __str__


EMPTY = Graph(frozenset(), ())


def graph_concat(a: Graph, b: Graph) -> Graph:
    return Graph(a.nodes | b.nodes, a.lits + b.lits)


def graph_equivalent(a: Graph, b: Graph) -> bool:
    return a.nodes == b.nodes and Counter(a.lits) == Counter(b.lits)


def check_injective(mapping: Mapping[str, str], domain: Iterable[str]) -> None:
    seen = {}
    for n in domain:
        m = mapping.get(n, n)
        if m in seen and seen[m] != n:
            raise RenamingError(f"renaming sends {seen[m]} and {n} to {m}")
        seen[m] = n


def rename(g: Graph, mapping: Mapping[str, str]) -> Graph:
    """Apply ``mapping`` pointwise; nodes outside it stay put."""
    check_injective(mapping, g.nodes)
    return Graph(frozenset(mapping.get(n, n) for n in g.nodes),
                 tuple(l.rename(mapping) for l in g.lits))


def is_prefix(p: Graph, g: Graph) -> bool:
    k = len(p.lits)
    return p.lits == g.lits[:k] and p.nodes <= g.nodes


def fresh_names(used: Iterable[str], count: int, prefix: str = FRESH_PREFIX) -> list:
    """The ``count`` smallest counter names ``prefix<k>`` not in ``used``."""
    used = set(used)
    out = []
    k = 0
    while len(out) < count:
        name = f"{prefix}{k}"
        if name not in used:
            out.append(name)
        k += 1
    return out


def sequence_key(lits: Sequence[Literal]) -> tuple:
    """Key of a literal sequence up to node renaming.

    Nodes are renumbered in order of first occurrence, so two sequences get
    the same key iff one is a renaming of the other.
    """
    ids = {}
    out = []
    for l in lits:
        out.append((l.label, tuple(ids.setdefault(n, len(ids)) for n in l.nodes)))
    return tuple(out)


def canonical_key(g: Graph) -> tuple:
    """Isomorphism-invariant key of a graph up to renaming and ⋈.

    Colour refinement splits the nodes into classes, then every ordering
    inside the remaining tie classes is tried.  Fine for the small graphs
    the oracles work with.
    """
    nodes = sorted(g.nodes)
    occ = {n: [] for n in nodes}
    for i, l in enumerate(g.lits):
        for pos, n in enumerate(l.nodes):
            occ[n].append((i, pos))
    colour = {n: (len(occ[n]),) for n in nodes}
    while True:
        sig = {}
        for n in nodes:
            parts = []
            for i, pos in occ[n]:
                l = g.lits[i]
                parts.append((l.label, pos, tuple(colour[m] for m in l.nodes)))
            sig[n] = (colour[n], tuple(sorted(parts)))
        ranks = {s: r for r, s in enumerate(sorted(set(sig.values())))}
        new = {n: (ranks[sig[n]],) for n in nodes}
        if len(set(new.values())) == len(set(colour.values())):
            colour = new
            break
        colour = new
    classes = {}
    for n in nodes:
        classes.setdefault(colour[n], []).append(n)
    blocks = [classes[c] for c in sorted(classes)]
    best = None
    for perms in itertools.product(*(itertools.permutations(b) for b in blocks)):
        order = [n for p in perms for n in p]
        num = {n: i for i, n in enumerate(order)}
        key = tuple(sorted((l.label, tuple(num[n] for n in l.nodes)) for l in g.lits))
        if best is None or key < best:
            best = key
    return (len(nodes), best or ())


def canonical_graph(g: Graph) -> Graph:
    """A representative of g's isomorphism class with nodes named 1, 2, ..."""
    size, key = canonical_key(g)
    lits = [Literal(lbl, tuple(str(i + 1) for i in ns)) for lbl, ns in key]
    return Graph.of(lits, (str(i + 1) for i in range(size)))


@dataclass(frozen=True)
class PseudoLiteral:
    """A literal whose slots are nodes/parameters, DASH or BULLET."""
    label: str
    slots: tuple

    def __str__(self):
        return f"{self.label}({','.join(self.slots)})"

    __repr__ = __str__

    def params(self) -> list:
        return [(i, s) for i, s in enumerate(self.slots) if s not in (DASH, BULLET)]


def parse_follow_entry(text: str):
    """Inverse of ``str`` for follow entries; handy in tests."""
    text = text.strip()
    if text == END:
        return END
    m = re.fullmatch(r"([^\s(]+)\((.*)\)", text)
    if not m:
        raise GraphError(f"bad follow entry {text!r}")
    slots = tuple(a.strip() for a in m.group(2).split(",") if a.strip())
    return PseudoLiteral(m.group(1), slots)
