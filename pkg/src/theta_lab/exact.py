"""Exhaustive oracles for cc, Theta, vartheta and the independence number.

These are desk-scale ground truth: maximal-set enumeration followed by an exact
set-cover branch and bound.  Every solver refuses instances beyond its
:class:`SolveLimits` instead of silently degrading.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

from .cover import CliqueCover, CoverCertificate, verify_clique_cover, verify_theta_cover
from .errors import InputError, ResourceError
from .hypergraph import Hypergraph, complement_edges, from_mask, to_mask


@dataclass(frozen=True)
class SolveLimits:
    max_vertices: int = 16
    max_candidate_sets: int = 10**6
    time_budget: float = 60.0

    def __post_init__(self):
        if self.max_vertices <= 0 or self.max_candidate_sets <= 0 or self.time_budget <= 0:
            raise InputError("solve limits must be positive")


DEFAULT_LIMITS = SolveLimits()


class CoverSolution(NamedTuple):
    size: int
    cover: CliqueCover | CoverCertificate
    optimal: bool = True


def _check_vertices(G: Hypergraph, limits: SolveLimits) -> None:
    if G.n > limits.max_vertices:
        raise ResourceError(
            f"instance has {G.n} vertices, limit max_vertices={limits.max_vertices}", "max_vertices"
        )


# -- maximal sets of a hereditary family ---------------------------------------


def _maximal_sets(G: Hypergraph, cliques: bool, limit: int) -> list[int]:
    """Bitmasks of all maximal vertex sets that are cliques (every k-subset an edge)
    or independent (no k-subset an edge), by Bron-Kerbosch style extension.

    Adding u to C ∪ {v} only creates the new k-subsets T ∪ {v, u} with T ⊆ C, so
    candidate lists are refined incrementally.  Pivoting is only sound for k = 2.
    """
    n, k = G.n, G.k
    edge_masks = set(G.edge_masks)
    out: list[int] = []

    if k == 2:
        adj = [0] * n
        for a, b in G.edges:
            adj[a] |= 1 << b
            adj[b] |= 1 << a
        full = (1 << n) - 1
        nbr = adj if cliques else [full & ~adj[v] & ~(1 << v) for v in range(n)]

        def bk2(R: int, P: int, X: int) -> None:
            if not P and not X:
                out.append(R)
                if len(out) > limit:
                    raise ResourceError(f"more than {limit} candidate sets", "max_candidate_sets")
                return
            # pivot maximising |P ∩ N(u)|
            PX = P | X
            best, pivot = -1, 0
            while PX:
                low = PX & -PX
                u = low.bit_length() - 1
                c = (P & nbr[u]).bit_count()
                if c > best:
                    best, pivot = c, u
                PX ^= low
            todo = P & ~nbr[pivot]
            while todo:
                low = todo & -todo
                v = low.bit_length() - 1
                bk2(R | low, P & nbr[v], X & nbr[v])
                P &= ~low
                X |= low
                todo ^= low

        bk2(0, (1 << n) - 1, 0)
        return out

    def compatible(C: list[int], v: int, u: int) -> bool:
        base = (1 << v) | (1 << u)
        for T in combinations(C, k - 2):
            hit = (base | to_mask(T)) in edge_masks
            if hit != cliques:
                return False
        return True

    def bk(C: list[int], P: list[int], X: list[int]) -> None:
        if not P and not X:
            out.append(to_mask(C))
            if len(out) > limit:
                raise ResourceError(f"more than {limit} candidate sets", "max_candidate_sets")
            return
        P = list(P)
        X = list(X)
        while P:
            v = P.pop(0)
            bk(C + [v], [u for u in P if compatible(C, v, u)], [u for u in X if compatible(C, v, u)])
            X.append(v)

    bk([], list(range(n)), [])
    return out


def maximal_cliques(G: Hypergraph, limit: int = 10**6) -> list[tuple[int, ...]]:
    """Maximal cliques with at least k vertices, in lexicographic order."""
    return sorted(from_mask(m) for m in _maximal_sets(G, True, limit) if m.bit_count() >= G.k)


def maximal_independent_sets(G: Hypergraph, limit: int = 10**6) -> list[tuple[int, ...]]:
    return sorted(from_mask(m) for m in _maximal_sets(G, False, limit))


# -- exact set cover -------------------------------------------------------------


class _Timeout(Exception):
    pass


def exact_set_cover(
    element_masks: list[int], candidate_masks: list[int], time_budget: float = 60.0
) -> tuple[list[int], bool]:
    """Minimum number of candidates whose union contains every element.

    ``element_masks`` and ``candidate_masks`` are vertex bitmasks; an element is
    covered by a candidate when it is a subset of it.  Returns (chosen candidate
    indices, proven optimal).  Branches on the uncovered element with the fewest
    allowed candidates; sibling branches forbid the candidates already tried.
    Pruning uses the larger of ceil(uncovered / best single cover) and a greedy
    packing of uncovered elements that no allowed candidate covers together.
    """
    N = len(element_masks)
    if N == 0:
        return [], True
    covers = []
    for cm in candidate_masks:
        bits = 0
        for i, em in enumerate(element_masks):
            if em & cm == em:
                bits |= 1 << i
        covers.append(bits)
    by_element = [[j for j, b in enumerate(covers) if b >> i & 1] for i in range(N)]
    if any(not c for c in by_element):
        raise ValueError("some element has no covering candidate")
    cand_bits = [sum(1 << j for j in js) for js in by_element]
    full = (1 << N) - 1

    # greedy incumbent
    uncovered = full
    greedy = []
    while uncovered:
        j = max(range(len(covers)), key=lambda j: ((covers[j] & uncovered).bit_count(), -j))
        greedy.append(j)
        uncovered &= ~covers[j]
    best = list(greedy)
    deadline = time.monotonic() + time_budget
    nodes = 0

    def search(uncovered: int, chosen: list[int], banned: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes & 1023 == 0 and time.monotonic() > deadline:
            raise _Timeout
        if not uncovered:
            if len(chosen) < len(best):
                best = list(chosen)
            return
        budget = len(best) - len(chosen)
        # elements by allowed-candidate count; an element with none is a dead end
        live = []
        rest = uncovered
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            rest ^= low
            allowed = cand_bits[i] & ~banned
            if not allowed:
                return
            live.append((allowed.bit_count(), i, allowed))
        live.sort()
        used = packed = 0
        for _, _, allowed in live:
            if not allowed & used:
                packed += 1
                used |= allowed
        if packed >= budget:
            return
        reach = max((covers[j] & uncovered).bit_count() for j in range(len(covers)) if not banned >> j & 1)
        if -(-uncovered.bit_count() // reach) >= budget:
            return
        _, e, allowed = live[0]
        branch = [j for j in by_element[e] if allowed >> j & 1]
        branch.sort(key=lambda j: (-(covers[j] & uncovered).bit_count(), j))
        for j in branch:
            chosen.append(j)
            search(uncovered & ~covers[j], chosen, banned)
            chosen.pop()
            banned |= 1 << j

    try:
        search(full, [], 0)
    except _Timeout:
        return sorted(best), False
    return sorted(best), True


# -- public oracles ------------------------------------------------------------------


def cc_exact(G: Hypergraph, limits: SolveLimits = DEFAULT_LIMITS) -> CoverSolution:
    """Minimum clique cover of the edges of G."""
    _check_vertices(G, limits)
    if not G.edges:
        return CoverSolution(0, CliqueCover(()))
    cliques = maximal_cliques(G, limits.max_candidate_sets)
    chosen, optimal = exact_set_cover(list(G.edge_masks), [to_mask(c) for c in cliques], limits.time_budget)
    cover = CliqueCover(tuple(cliques[j] for j in chosen))
    verdict = verify_clique_cover(G, cover)
    if not verdict:
        raise AssertionError(f"solver produced an invalid clique cover: {verdict.reason}")
    return CoverSolution(len(cover), cover, optimal)


def min_representation_size(G: Hypergraph, t_max: int | None = None) -> int | None:
    """Smallest t admitting a set representation, by breadth-first search over label classes.

    Works straight from the definition: label s is shared by exactly the vertices
    of a class A, and A is usable iff no non-edge k-subset lies inside it.  BFS
    over the set of edges already given a common label, always labelling the
    first unlabelled edge next.  Exponential; meant for n <= 6.
    """
    k = G.k
    edge_index = {e: i for i, e in enumerate(G.edges)}
    m = len(G.edges)
    goal = (1 << m) - 1
    classes = []
    for A in range(1 << G.n):
        if A.bit_count() < k:
            continue
        members = from_mask(A)
        bits = 0
        for s in combinations(members, k):
            i = edge_index.get(s)
            if i is None:
                break
            bits |= 1 << i
        else:
            classes.append(bits)
    by_edge = [[c for c in classes if c >> i & 1] for i in range(m)]
    if goal == 0:
        return 0
    frontier = {0}
    seen = {0}
    t = 0
    while frontier:
        t += 1
        if t_max is not None and t > t_max:
            return None
        nxt = set()
        for state in frontier:
            free = goal & ~state
            low = (free & -free).bit_length() - 1
            for c in by_edge[low]:
                s2 = state | c
                if s2 == goal:
                    return t
                if s2 not in seen:
                    seen.add(s2)
                    nxt.add(s2)
        frontier = nxt
    return None


def theta_exact(G: Hypergraph, limits: SolveLimits = DEFAULT_LIMITS) -> int:
    """Theta(G) = cc(G); for n <= 6 a direct representation search must agree."""
    sol = cc_exact(G, limits)
    if G.n <= 6 and sol.optimal:
        direct = min_representation_size(G, t_max=sol.size)
        if direct != sol.size:
            raise AssertionError(f"clique cover search gave {sol.size}, representation search {direct}")
    return sol.size


def vartheta_exact(G: Hypergraph, limits: SolveLimits = DEFAULT_LIMITS) -> CoverSolution:
    """Minimum number of independent sets of G covering every non-edge."""
    _check_vertices(G, limits)
    non_edges = [to_mask(s) for s in complement_edges(G)]
    if not non_edges:
        return CoverSolution(0, CoverCertificate((), achieved_for=G.fingerprint, provenance={"algorithm": "exact"}))
    candidates = [s for s in maximal_independent_sets(G, limits.max_candidate_sets) if len(s) >= G.k]
    chosen, optimal = exact_set_cover(non_edges, [to_mask(s) for s in candidates], limits.time_budget)
    cert = CoverCertificate(
        [candidates[j] for j in chosen],
        achieved_for=G.fingerprint,
        provenance={"algorithm": "exact", "optimal": str(optimal).lower()},
        complete=True,
        uncovered=0,
    )
    verdict = verify_theta_cover(G, cert)
    if not verdict:
        raise AssertionError(f"solver produced an invalid certificate: {verdict.reason}")
    return CoverSolution(cert.t, cert, optimal)


def independence_number(G: Hypergraph, limits: SolveLimits = DEFAULT_LIMITS) -> int:
    """alpha(G) by depth-first search; prunes when size + remaining candidates <= best."""
    _check_vertices(G, limits)
    n = G.n
    incident = [[G.edge_masks[j] for j in G.incidence[v]] for v in range(n)]
    deadline = time.monotonic() + limits.time_budget
    best = 0
    nodes = 0

    def addable(S: int, w: int) -> bool:
        T = S | (1 << w)
        return not any(em & T == em for em in incident[w])

    def dfs(S: int, size: int, cand: list[int]) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes & 4095 == 0 and time.monotonic() > deadline:
            raise ResourceError("independence number search exceeded time_budget", "time_budget")
        if size > best:
            best = size
        for i, u in enumerate(cand):
            if size + len(cand) - i <= best:
                return
            S2 = S | (1 << u)
            dfs(S2, size + 1, [w for w in cand[i + 1:] if addable(S2, w)])

    # vertices of high degree last: low-degree vertices rarely block others
    order = sorted(range(n), key=lambda v: (len(G.incidence[v]), v))
    dfs(0, 0, order)
    return best


def complement_duality_check(G: Hypergraph, limits: SolveLimits = DEFAULT_LIMITS) -> tuple[int, int]:
    """(vartheta(G), cc(complement of G)); equal by definition of vartheta."""
    return vartheta_exact(G, limits).size, cc_exact(G.complement(), limits).size
