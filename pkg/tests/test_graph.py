import pytest
from hypothesis import given, strategies as st

from hrpsr.graph import (BULLET, DASH, END, Graph, GraphError, Literal, PseudoLiteral,
                         RenamingError, canonical_key, graph_concat, graph_equivalent,
                         is_prefix, lit, parse_follow_entry, rename)

T = Graph.parse("root(1) e(1,2) e(1,3) e(2,4)")


def test_literal_rejects_repeated_node():
    with pytest.raises(GraphError):
        lit("e(1,1)")


def test_graph_requires_literal_nodes():
    with pytest.raises(GraphError):
        Graph(frozenset({"1"}), (lit("e(1,2)"),))


def test_concat():
    empty = Graph.of()
    assert graph_concat(empty, T) == T
    g = graph_concat(Graph.parse("root(1)"), Graph.parse("e(1,2)"))
    assert g.nodes == {"1", "2"}
    assert g.lits == (lit("root(1)"), lit("e(1,2)"))
    padded = Graph.of([lit("root(1)")], ["9"])
    assert graph_concat(padded, empty).nodes == {"1", "9"}


def test_equivalence():
    assert graph_equivalent(T, T)
    shuffled = Graph.parse("e(2,4) root(1) e(1,3) e(1,2)")
    assert graph_equivalent(T, shuffled)
    assert not graph_equivalent(Graph.parse("root(1) e(1,2)"), Graph.parse("root(1) e(2,1)"))
    assert not graph_equivalent(T, Graph.of(T.lits, ["7"]))


def test_equivalence_counts_duplicates():
    a = Graph.parse("e(1,2) e(1,2) e(2,1)")
    b = Graph.parse("e(1,2) e(2,1) e(2,1)")
    assert not graph_equivalent(a, b)


def test_rename():
    g = Graph.parse("root(1) e(1,2)")
    assert rename(g, {}) == g
    assert rename(g, {"1": "a", "2": "b"}) == Graph.parse("root(a) e(a,b)")
    with pytest.raises(RenamingError):
        rename(g, {"1": "x", "2": "x"})


def test_prefix():
    g = Graph.parse("root(1) e(1,2)")
    assert is_prefix(Graph.of(), g)
    assert is_prefix(Graph.parse("root(1)"), g)
    assert not is_prefix(Graph.parse("e(1,2)"), g)


def test_follow_entry_roundtrip():
    for text in ("e(b,_)", "e(*,_)", "root(_)", "$"):
        e = parse_follow_entry(text)
        assert str(e) == text
    assert parse_follow_entry("$") == END
    assert parse_follow_entry("e(*,_)") == PseudoLiteral("e", (BULLET, DASH))
    assert PseudoLiteral("e", ("a", DASH)).params() == [(0, "a")]


def test_canonical_key_ignores_names_and_order():
    other = Graph.parse("e(x,q) e(w,z) root(w) e(w,x)")
    assert canonical_key(other) == canonical_key(T)
    assert canonical_key(Graph.parse("root(1) e(1,2) e(2,3)")) != canonical_key(
        Graph.parse("root(1) e(1,2) e(1,3)"))


# random small graphs over {r/1, e/2}
@st.composite
def graphs(draw):
    n = draw(st.integers(1, 5))
    nodes = [str(i) for i in range(1, n + 1)]
    lits = []
    for _ in range(draw(st.integers(0, 5))):
        if n >= 2 and draw(st.booleans()):
            a, b = draw(st.permutations(nodes))[:2]
            lits.append(Literal("e", (a, b)))
        else:
            lits.append(Literal("r", (draw(st.sampled_from(nodes)),)))
    return Graph.of(lits, nodes)


@given(graphs(), st.randoms())
def test_equivalence_is_permutation_invariant(g, rnd):
    lits = list(g.lits)
    rnd.shuffle(lits)
    h = Graph(g.nodes, tuple(lits))
    assert graph_equivalent(g, h) and graph_equivalent(h, g)
    assert canonical_key(g) == canonical_key(h)


@given(graphs(), graphs(), graphs())
def test_equivalence_is_transitive(a, b, c):
    if graph_equivalent(a, b) and graph_equivalent(b, c):
        assert graph_equivalent(a, c)


@given(graphs(), st.randoms())
def test_canonical_key_survives_renaming(g, rnd):
    names = sorted(g.nodes)
    perm = names[:]
    rnd.shuffle(perm)
    mapping = {a: "n" + b for a, b in zip(names, perm)}
    assert canonical_key(rename(g, mapping)) == canonical_key(g)
