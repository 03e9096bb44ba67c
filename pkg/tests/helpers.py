"""Random inputs shared by the runtime and acceptance tests."""
import random

from hrpsr.graph import Graph, Literal


def random_tree(edges: int, rng: random.Random, shuffle: bool = True) -> Graph:
    """A random recursive tree: node k hangs below a uniformly chosen earlier node."""
    lits = [Literal("root", ("1",))]
    for k in range(2, edges + 2):
        lits.append(Literal("e", (str(rng.randint(1, k - 1)), str(k))))
    if shuffle:
        rng.shuffle(lits)
    return Graph.of(lits)


def tree_like(edges: int, rng: random.Random) -> Graph:
    """Mostly trees, with some damage: a dropped root, a second root, a stray or reversed edge."""
    g = random_tree(edges, rng)
    lits = list(g.lits)
    kind = rng.randrange(5)
    if kind == 1:
        lits = [l for l in lits if l.label != "root"]
    elif kind == 2:
        lits.append(Literal("root", (str(rng.randint(1, edges + 1)),)))
    elif kind == 3:
        lits.append(Literal("e", (str(edges + 2), str(edges + 3))))
    elif kind == 4 and edges:
        i = rng.choice([i for i, l in enumerate(lits) if l.label == "e"])
        lits[i] = Literal("e", lits[i].nodes[::-1])
    rng.shuffle(lits)
    return Graph.of(lits)
