"""Acceptance suite.

Every test prints one ``criterion N: PASS|FAIL ...`` line; the lines are
repeated in the terminal summary.  Run it alone with
``pytest tests/test_acceptance.py`` or as a script.
"""
import gc
import random
import sys
import time

import pytest
from helpers import random_tree, tree_like

from hrpsr import analyze, build_dcfa, build_ncfa, parse_grammar_text, psr_parse
from hrpsr.cfa import dcfa_approves, ncfa_approves
from hrpsr.crosscheck import ReduceAgreement, check_reduce_enabling, verdicts
from hrpsr.fec import check_fec, check_fec_dynamic
from hrpsr.graph import Graph, graph_equivalent
from hrpsr.grammar import derivations, expansions, membership_index, replay, start_graph
from hrpsr.oracle import small_graphs, viable_prefix_check
from hrpsr.render import format_tables

# tolerances
STATE_SLACK = 1
TABLE_SECONDS = 1.0
ORACLE_SECONDS = 300.0
WALL_CLOCK_RATIO = 15.0
MOVE_MARGIN = 1.05

RESULTS = {}

ROOTLESS_TREES = ("start Z\nterm e 2\nnonterm T 1\nrule Z() -> T(x)\n"
                  "rule T(y) -> T(y) e(y,z) T(z)\nrule T(y) ->\n")


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def timed_analysis(grammar):
    start = time.perf_counter()
    tables = analyze(build_dcfa(grammar))
    verdict = check_fec(tables, "auto")
    return tables, verdict, time.perf_counter() - start


def table_row(tables, verdict, seconds) -> str:
    c = tables.dcfa.counts()
    return (f"states={c['states']} items={c['items']} transitions={c['transitions']} "
            f"conflicts={len(tables.conflicts)} fec={verdict.short()} time={seconds:.2f}s")


def random_member(grammar, rng: random.Random, size: int) -> Graph:
    """Random rightmost derivation; past ``size`` literals it prefers closing rules."""
    g = start_graph()
    while True:
        options = list(expansions(grammar, g))
        if not options:
            return g
        if len(g.lits) >= size:
            def open_count(h):
                return sum(not grammar.is_terminal(l.label) for l in h[1].lits)
            fewest = min(map(open_count, options))
            options = [o for o in options if open_count(o) == fewest]
        g = rng.choice(options)[1]


def shuffled(g: Graph, rng: random.Random) -> Graph:
    lits = list(g.lits)
    rng.shuffle(lits)
    return Graph(g.nodes, tuple(lits))


@pytest.fixture(scope="module")
def oracle_corpus(trees):
    """Graphs over root/1 and e/2: at most one root, four edges and six nodes."""
    graphs = small_graphs({"root": 1, "e": 2}, 5, 6, {"root": 1, "e": 4})
    return graphs, membership_index(trees, 5, 6)


def test_criterion_1_tree_table(trees):
    tables, verdict, seconds = timed_analysis(trees)
    c = tables.dcfa.counts()
    ok = (c["items"] == 10 and c["transitions"] == 4 and abs(c["states"] - 4) <= STATE_SLACK
          and tables.conflict_free and verdict.yes and seconds < TABLE_SECONDS)
    variant = timed_analysis(parse_grammar_text(ROOTLESS_TREES))
    report(1, ok, f"{table_row(tables, verdict, seconds)} "
                  f"(root-less variant: {table_row(*variant)})")


def test_criterion_2_persuade_table(persuade):
    tables, verdict, seconds = timed_analysis(persuade)
    c = tables.dcfa.counts()
    ok = (c["items"] == 36 and c["transitions"] == 20 and abs(c["states"] - 9) <= STATE_SLACK
          and tables.conflict_free and verdict.yes and seconds < TABLE_SECONDS)
    report(2, ok, table_row(tables, verdict, seconds))


def test_criterion_3_follow_anchors(tree_tables):
    dump = format_tables(tree_tables).splitlines()
    loop = [s.id for s in tree_tables.dcfa.states
            if any(it.rule == 2 and it.dot == 3 for it in s.items)]
    assert len(loop) == 1
    lines = {l.split()[1]: l for l in dump if l.startswith(f"trigger {loop[0]}.")}
    shift = next(l for l in lines.values() if " shift " in l)
    reduce = next(l for l in lines.values() if " reduce " in l)
    want = [
        (shift, "follow={e(b,_)}"),
        (reduce, "follow={e(a,_), e(*,_), $}"),
        (shift, "follow*={e(b,_), e(*,_), e(_,_)}"),
        (reduce, "follow*={e(a,_), e(*,_), e(_,_), $}"),
    ]
    hits = sum(f" {text}" in line.split(" pos=")[1] for line, text in want)
    report(3, hits == 4, f"{hits}/4 anchor sets match in state {loop[0]}")


def test_criterion_4_oracle_equivalence(tree_tables, oracle_corpus):
    graphs, members = oracle_corpus
    start = time.perf_counter()
    bad = []
    accepted = 0
    for g in graphs:
        v = verdicts(tree_tables, members, g)
        accepted += v.member
        if not v.agree:
            bad.append((str(g), v))
    seconds = time.perf_counter() - start
    report(4, not bad and seconds < ORACLE_SECONDS,
           f"graphs={len(graphs)} members={accepted} disagreements={len(bad)} "
           f"time={seconds:.0f}s {bad[:3] if bad else ''}".rstrip())


def test_criterion_5_viable_prefixes(trees, persuade):
    checked = disagreements = 0
    viable = 0
    for grammar in (trees, persuade):
        ncfa, dcfa = build_ncfa(grammar), build_dcfa(grammar)
        prefixes = set()
        for _, forms in derivations(grammar, 6):
            for form in forms:
                for k in range(len(form.lits) + 1):
                    prefixes.add(form.lits[:k])
        for p in prefixes:
            a, b, c = ncfa_approves(ncfa, p), dcfa_approves(dcfa, p), viable_prefix_check(grammar, p)
            checked += 1
            viable += c
            disagreements += not (a == b == c)
    report(5, disagreements == 0,
           f"prefixes={checked} viable={viable} disagreements={disagreements}")


def test_criterion_6_derivation_validity(tree_tables, persuade_tables):
    rng = random.Random(2024)
    corpus = [(tree_tables, tree_like(rng.randint(0, 40), rng)) for _ in range(350)]
    corpus += [(persuade_tables, shuffled(random_member(persuade_tables.grammar, rng,
                                                        rng.randint(1, 12)), rng))
               for _ in range(150)]
    accepted = valid = 0
    for tables, g in corpus:
        res = psr_parse(tables, g)
        if res.accepted:
            accepted += 1
            valid += graph_equivalent(replay(tables.grammar, res.derivation), g)
    report(6, accepted > 0 and valid == accepted,
           f"corpus={len(corpus)} accepted={accepted} replayed_equivalent={valid}")


def test_criterion_7_permutation_invariance(tree_tables, persuade_tables):
    rng = random.Random(77)
    pool = [(tree_tables, random_tree(rng.randint(1, 30), rng)) for _ in range(35)]
    while len(pool) < 50:
        g = random_member(persuade_tables.grammar, rng, rng.randint(1, 10))
        if psr_parse(persuade_tables, g).accepted:
            pool.append((persuade_tables, g))
    assert all(psr_parse(t, g).accepted for t, g in pool)
    changed = 0
    for tables, g in pool:
        for _ in range(10):
            h = shuffled(g, rng)
            res = psr_parse(tables, h)
            changed += not (res.accepted and graph_equivalent(res.graph, g))
    report(7, changed == 0, f"graphs={len(pool)} permutations={len(pool) * 10} changed={changed}")


def _best_time(tables, g, runs):
    best = None
    for _ in range(runs):
        gc.collect()
        start = time.perf_counter()
        res = psr_parse(tables, g)
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return res, best


def test_criterion_8_linearity(tree_tables):
    rng = random.Random(8)
    # fit c on trees with 10^3 edges: moves <= c * |g| + c
    c = 0.0
    for _ in range(5):
        g = random_tree(1000, rng)
        res = psr_parse(tree_tables, g)
        assert res.accepted
        c = max(c, res.moves / (len(g.lits) + 1))
    c *= MOVE_MARGIN
    within = True
    details = [f"c={c:.3f}"]
    times = {}
    for edges, runs in ((10_000, 3), (100_000, 2)):
        g = random_tree(edges, rng)
        res, seconds = _best_time(tree_tables, g, runs)
        times[edges] = seconds
        within &= bool(res.accepted) and res.moves <= c * len(g.lits) + c
        details.append(f"|g|={len(g.lits)} moves={res.moves} bound={c * len(g.lits) + c:.0f} "
                       f"time={seconds:.2f}s")
    ratio = times[100_000] / times[10_000]
    details.append(f"ratio={ratio:.1f}")
    report(8, within and ratio <= WALL_CLOCK_RATIO, " ".join(details))


def test_criterion_9_series_parallel_negative(sp_tables):
    verdict = check_fec_dynamic(sp_tables, max_lits=5)
    ok = len(sp_tables.conflicts) >= 1 and verdict.verdict == "refuted"
    report(9, ok, f"conflicts={len(sp_tables.conflicts)} fec={verdict.verdict} "
                  f"witness={verdict.witness.get('input', '-')}")


def test_criterion_10_reduce_enabling(tree_tables, oracle_corpus):
    graphs, _ = oracle_corpus
    agreement = ReduceAgreement()
    for g in graphs:
        check_reduce_enabling(tree_tables.dcfa, g, agreement)
    report(10, agreement.configurations > 0 and not agreement.disagreements,
           f"configurations={agreement.configurations} "
           f"disagreements={len(agreement.disagreements)}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
