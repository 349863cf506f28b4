"""Shared fixtures and brute-force oracles.

The oracles here enumerate raw subsets with itertools and never call the
package's solvers, so they can serve as independent ground truth.
"""

from itertools import combinations
from math import isqrt

import numpy as np
import pytest
from hypothesis import strategies as st

from theta_lab.hypergraph import Hypergraph

FANO = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]


def c5() -> Hypergraph:
    return Hypergraph(2, 5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])


@pytest.fixture
def C5():
    return c5()


def random_hypergraph(rng: np.random.Generator, n: int, k: int, density: float) -> Hypergraph:
    edges = [s for s in combinations(range(n), k) if rng.random() < density]
    return Hypergraph(k, n, edges)


@st.composite
def hypergraphs(draw, max_n=7, ks=(2, 3)):
    k = draw(st.sampled_from(ks))
    n = draw(st.integers(min_value=k, max_value=max_n))
    all_sets = list(combinations(range(n), k))
    chosen = draw(st.lists(st.booleans(), min_size=len(all_sets), max_size=len(all_sets)))
    return Hypergraph(k, n, [s for s, keep in zip(all_sets, chosen) if keep])


# -- brute-force oracles ---------------------------------------------------------


def brute_degree(edges, S):
    return sum(1 for e in edges if set(S) <= set(e))


def brute_max_degree(G, i):
    return max((brute_degree(G.edges, S) for S in combinations(range(G.n), i)), default=0)


def _subsets(n, min_size):
    for r in range(min_size, n + 1):
        yield from combinations(range(n), r)


def brute_cliques(G):
    E = set(G.edges)
    return [C for C in _subsets(G.n, G.k) if all(s in E for s in combinations(C, G.k))]


def brute_independents(G):
    E = set(G.edges)
    return [C for C in _subsets(G.n, G.k) if not any(s in E for s in combinations(C, G.k))]


def brute_min_cover(targets, candidates):
    """Smallest number of candidate sets such that every target is a subset of one."""
    targets = [set(t) for t in targets]
    if not targets:
        return 0
    cands = [set(c) for c in candidates]
    for t in range(1, len(targets) + 1):
        for combo in combinations(cands, t):
            if all(any(x <= c for c in combo) for x in targets):
                return t
    raise AssertionError("no cover exists")


def brute_cc(G):
    return brute_min_cover(G.edges, brute_cliques(G))


def brute_vartheta(G):
    E = set(G.edges)
    non_edges = [s for s in combinations(range(G.n), G.k) if s not in E]
    return brute_min_cover(non_edges, brute_independents(G))


def brute_alpha(G):
    E = set(G.edges)
    for r in range(G.n, -1, -1):
        for S in combinations(range(G.n), r):
            if not any(s in E for s in combinations(S, G.k)):
                return r
    return 0


# -- cleaning-safety conditions --------------------------------------------------


def event_violations(G, H_edges, ebar, W):
    """Pairs (S, R) breaking the safety conditions for ebar inside sample W.

    (a) no edge g of G with g ∩ ebar = S nonempty, S not in H, |S| <= k-1, g - ebar ⊆ W;
    (b) no (k-1)-set h of H with h ∩ ebar = S, 1 <= |S| <= k-2, h - ebar ⊆ W.
    """
    k = G.k
    e, outside = set(ebar), set(W) - set(ebar)
    H_set = set(H_edges)
    bad = []
    for g in G.edges:
        S = tuple(v for v in g if v in e)
        R = set(g) - e
        if 1 <= len(S) <= k - 1 and S not in H_set and R <= outside:
            bad.append((S, tuple(sorted(R))))
    for h in H_edges:
        S = tuple(v for v in h if v in e)
        R = set(h) - e
        if 1 <= len(S) <= k - 2 and R <= outside:
            bad.append((S, tuple(sorted(R))))
    return bad


def safe_triple(rng, G, H_edges, ebar, density=0.6, keep=()):
    """A sample W ⊇ ebar satisfying the safety conditions: start from ebar, ``keep``
    and a random set, then drop outside vertices of violating pairs until none
    remain.  Returns None if a violation only involves kept vertices."""
    others = [v for v in range(G.n) if v not in ebar]
    W = set(ebar) | set(keep) | {v for v in others if rng.random() < density}
    while True:
        bad = event_violations(G, H_edges, ebar, W)
        if not bad:
            return tuple(sorted(W))
        _, R = bad[int(rng.integers(len(bad)))]
        free = [v for v in R if v not in keep]
        if not free:
            return None
        W.discard(free[int(rng.integers(len(free)))])


def planted_triple(rng, n, k, d, density):
    """(G, ebar, W) where W satisfies the safety conditions for the non-edge ebar
    and induces at least one edge that meets ebar, so cleaning has work to do.

    A (k-1)-subset S of ebar is pushed into the auxiliary graph by adding
    ceil(sqrt d) edges S + {r}; one such r is kept in W.
    """
    from theta_lab.randcover import build_aux_graph

    ebar = tuple(sorted(int(v) for v in rng.choice(n, size=k, replace=False)))
    others = [v for v in range(n) if v not in ebar]
    base = {s for s in combinations(range(n), k) if rng.random() < density and s != ebar}
    S = tuple(sorted(int(v) for v in rng.choice(ebar, size=k - 1, replace=False)))
    need = isqrt(d - 1) + 1
    outs = [int(v) for v in rng.choice(others, size=need, replace=False)]
    base |= {tuple(sorted(S + (r,))) for r in outs}
    G = Hypergraph(k, n, sorted(base))
    H = build_aux_graph(G, d)
    W = safe_triple(rng, G, H.graph.edges, ebar, keep=(outs[0],))
    if W is None:
        return None
    if not any(set(g) <= set(W) and set(g) & set(ebar) for g in G.edges):
        return None
    return G, H, ebar, W


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
