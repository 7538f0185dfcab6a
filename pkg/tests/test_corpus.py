import itertools
from collections import Counter

import networkx as nx
import numpy as np

from latrigid import corpus
from latrigid.bond_graph import is_connected
from latrigid.lattice_core import Configuration, canonical_form

# free polyomino counts, n = 1..11
KNOWN = [1, 1, 2, 5, 12, 35, 108, 369, 1285, 4655, 17073]


def brute_counts(max_n):
    # every shape has a translate whose lexicographic minimum is the origin
    out = []
    for n in range(1, max_n + 1):
        r = n - 1
        cand = [(x, y) for x in range(-r, r + 1) for y in range(-r, r + 1)
                if abs(x) + abs(y) <= r and (x, y) > (0, 0)]
        shapes = set()
        for rest in itertools.combinations(cand, n - 1):
            pts = ((0, 0),) + rest
            if is_connected(Configuration(pts)):
                shapes.add(canonical_form(pts))
        out.append(len(shapes))
    return out


def test_counts_match_brute_force():
    assert corpus.counts(5) == brute_counts(5)


def test_counts_match_known_values(corpus11):
    c = Counter(len(s) for s in corpus11)
    assert [c[n] for n in range(1, 12)] == KNOWN


def test_exhaustive_is_canonical_and_sorted():
    shapes = list(corpus.exhaustive(6))
    assert all(canonical_form(s) == s for s in shapes)
    assert shapes == sorted(shapes, key=lambda s: (len(s), s))
    assert len(set(shapes)) == len(shapes)


def test_simple_cycles_match_networkx():
    G = nx.grid_2d_graph(9, 9)
    want = {canonical_form(tuple(c)) for c in nx.chordless_cycles(G, length_bound=14) if len(c) >= 4}
    got = list(corpus.simple_cycles(14))
    assert set(got) == want
    assert Counter(len(s) for s in got) == {4: 1, 8: 1, 10: 1, 12: 4, 14: 7}


def test_random_clusters_reproducible():
    a = list(corpus.random_clusters(20, 15, seed=7))
    b = list(corpus.random_clusters(20, 15, seed=7))
    assert a == b
    for s in a:
        assert len(set(s)) == len(s)
        assert is_connected(Configuration(s))


def test_random_cluster_size():
    s = corpus.random_cluster(25, np.random.default_rng(1))
    assert len(s) == 25
