"""Text renderings: the table dump and DOT graphs of both automata."""
from __future__ import annotations

from .analysis import AnalysisTables, format_entries
from .cfa import DCFA, NCFA, format_dotted, format_item, format_transition


def format_counts(dcfa: DCFA) -> str:
    c = dcfa.counts()
    return " ".join(f"{k}={c[k]}" for k in
                    ("states", "items", "transitions", "all_states", "all_items", "all_transitions"))


def format_tables(tables: AnalysisTables) -> str:
    dcfa = tables.dcfa
    g = dcfa.grammar
    out = [
        f"# counts {format_counts(dcfa)}",
        "# states, items and transitions leave out the added rule Start() -> Z():",
        "# its two items, the accepting state and the transition into it.",
        "# The all_ counts include them.",
    ]
    for i, r in enumerate(g.rules):
        out.append(f"rule {i} {g.rule_name(i)}: {r}")
    for s in dcfa.states:
        tag = " accepting" if s.id == dcfa.accepting else (" initial" if s.id == 0 else "")
        out.append(f"state {s.id} params={','.join(s.params) or '-'}{tag}")
        for it in s.sorted_items(g):
            out.append(f"  item {format_item(g, it)}")
    for t in dcfa.transitions:
        out.append(f"transition {format_transition(t)}")
    for s in dcfa.states:
        for pos, t in enumerate(tables.order[s.id]):
            key = (s.id, t.ordinal)
            out.append(f"trigger {t.id} pos={pos} {t.describe(g)} "
                       f"follow={format_entries(tables.follow[key])} "
                       f"follow*={format_entries(tables.follow_star[key])}")
    for s, members in tables.conflicts:
        ids = " ".join(f"{s}.{o}" for o in sorted(members))
        out.append(f"conflict state={s} triggers={ids}")
    return "\n".join(out) + "\n"


def _quote(text: str) -> str:
    text = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return '"' + text + '"'


def ncfa_dot(ncfa: NCFA) -> str:
    g = ncfa.grammar
    ids = {q: f"n{i}" for i, q in enumerate(ncfa.states)}
    out = ["digraph ncfa {", "  rankdir=LR;", "  node [shape=box];"]
    for q in ncfa.states:
        out.append(f"  {ids[q]} [label={_quote(format_dotted(g, *q))}];")
    for src, l, dst in ncfa.goto:
        out.append(f"  {ids[src]} -> {ids[dst]} [label={_quote(str(l))}];")
    for src, dst in ncfa.closure:
        out.append(f"  {ids[src]} -> {ids[dst]} [style=dashed];")
    out.append("}")
    return "\n".join(out) + "\n"


def dcfa_dot(dcfa: DCFA) -> str:
    g = dcfa.grammar
    out = ["digraph dcfa {", "  rankdir=LR;", "  node [shape=box];"]
    for s in dcfa.states:
        label = _quote("\n".join([f"Q{s.id}"] + [format_item(g, it) for it in s.sorted_items(g)]))
        shape = ", peripheries=2" if s.id == dcfa.accepting else ""
        out.append(f"  q{s.id} [label={label}{shape}];")
    for t in dcfa.transitions:
        mu = ",".join(f"{q}/{m}" for q, m in sorted(t.mu.items()))
        label = _quote(f"{t.lit} [{mu}]")
        out.append(f"  q{t.src} -> q{t.dst} [label={label}];")
    out.append("}")
    return "\n".join(out) + "\n"
