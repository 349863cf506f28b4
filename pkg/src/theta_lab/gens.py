"""Seeded generators for extremal and test instance families.

Every generator is a pure function of its arguments: same parameters and seed,
same hypergraph.  Randomness comes from ``numpy.random.default_rng(seed)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import GenerationError, InputError
from .hypergraph import Hypergraph, VertexSet, balance_violations, format_hypergraph

_BATCH = 256


@dataclass(frozen=True)
class PartitionedInstance:
    hypergraph: Hypergraph
    parts: tuple[VertexSet, ...]
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        seen = sorted(v for part in self.parts for v in part)
        if seen != list(range(self.hypergraph.n)):
            raise InputError("parts must partition the vertex set")

    def to_text(self) -> str:
        return format_hypergraph(self.hypergraph, self.metadata)


def _linear_budget(k: int, d: int) -> int:
    return math.ceil(64 * 2 * k * k / d)


def gen_linear_kpartite(m: int, d: int, k: int, seed: int) -> PartitionedInstance:
    """Random linear k-partite k-graph with parts of size m and maximum degree <= d.

    Draws s = floor(d m / (2 k^2)) transversal edges one at a time by rejection:
    a uniform transversal k-tuple is accepted if none of its pairs is already
    covered (linearity) and none of its vertices has degree d yet.
    """
    if k < 2 or m < 1 or d < 1:
        raise InputError(f"need k >= 2, m >= 1, d >= 1; got k={k} m={m} d={d}")
    if d > m:
        raise InputError(f"degree cap d={d} exceeds part size m={m}")
    if k < 3 or m < 2 * k * k:
        warnings.warn(f"m={m}, k={k} lies outside the regime (k >= 3, m >= 2k^2) where success is guaranteed")
    s = d * m // (2 * k * k)
    rng = np.random.default_rng(seed)
    offsets = np.arange(k) * m
    deg = np.zeros(k * m, dtype=np.int64)
    pairs: set[tuple[int, int]] = set()
    edges: list[VertexSet] = []
    cap = _linear_budget(k, d)
    for _ in range(s):
        for _attempt in range(cap):
            e = tuple(int(v) for v in rng.integers(0, m, size=k) + offsets)
            if any(deg[v] >= d for v in e):
                continue
            ps = list(combinations(e, 2))
            if any(p in pairs for p in ps):
                continue
            pairs.update(ps)
            deg[list(e)] += 1
            edges.append(e)
            break
        else:
            raise GenerationError(
                f"no valid transversal edge after {cap} attempts (edge {len(edges) + 1} of {s})"
            )
    parts = tuple(tuple(range(i * m, (i + 1) * m)) for i in range(k))
    meta = {"generator": "linear", "m": m, "d": d, "k": k, "s": s, "seed": seed}
    return PartitionedInstance(Hypergraph(k, k * m, edges), parts, meta)


def clique_size(d: int, k: int) -> int:
    """Nearest positive integer to (d/2)^(1/(k-1))."""
    return max(1, math.floor((d / 2) ** (1.0 / (k - 1)) + 0.5))


def round_parameters(n: int, d: int, k: int) -> tuple[int, int]:
    """Nearest n' to n that gen_balanced_hard accepts (a positive multiple of k*p), and p."""
    p = clique_size(d, k)
    unit = k * p
    lower = max(unit, (n // unit) * unit)
    upper = lower + unit
    return (lower if n - lower <= upper - n else upper), p


def gen_balanced_hard(n: int, d: int, k: int, seed: int) -> PartitionedInstance:
    """k parts of n/k vertices, each tiled by disjoint complete k-graphs on p vertices,
    plus a random linear transversal k-graph of maximum degree floor(d/2).

    The output is checked to be d-balanced; failure raises GenerationError.
    """
    if k < 2 or d < 2:
        raise InputError(f"need k >= 2 and d >= 2; got k={k} d={d}")
    p = clique_size(d, k)
    if n % k or (n // k) % p:
        suggestion, _ = round_parameters(n, d, k)
        raise InputError(
            f"n={n} must be divisible by k*p={k * p}; use round_parameters(n, d, k) (suggests n={suggestion})"
        )
    m = n // k
    F = gen_linear_kpartite(m, d // 2, k, seed)
    edges = list(F.hypergraph.edges)
    if p >= k:
        for start in range(0, n, p):
            edges.extend(combinations(range(start, start + p), k))
    G = Hypergraph(k, n, edges)
    bad = balance_violations(G, d)
    if bad:
        raise GenerationError(f"construction with p={p} is not {d}-balanced: {bad}")
    meta = {"generator": "balanced-hard", "n": n, "d": d, "k": k, "p": p, "m": m, "seed": seed}
    return PartitionedInstance(G, F.parts, meta)


def gen_blowup_even(F: Hypergraph, ell: int) -> PartitionedInstance:
    """Replace vertex i of the 2-graph F by the group V_i = {i*ell, ..., i*ell + ell - 1}
    and edge {i, j} by V_i ∪ V_j, giving a 2*ell-uniform hypergraph."""
    if F.k != 2:
        raise InputError(f"blowup needs a 2-graph, got k={F.k}")
    if ell < 1:
        raise InputError(f"blowup factor must be positive, got {ell}")
    groups = tuple(tuple(range(i * ell, (i + 1) * ell)) for i in range(F.n))
    edges = [groups[i] + groups[j] for i, j in F.edges]
    G = Hypergraph(2 * ell, F.n * ell, edges)
    meta = {"generator": "blowup", "ell": ell, "k": 2 * ell, "base": F.fingerprint}
    return PartitionedInstance(G, groups, meta)


def _random_ksets(rng: np.random.Generator, n: int, k: int):
    """Endless stream of uniform k-subsets (sorted tuples)."""
    while True:
        batch = rng.integers(0, n, size=(_BATCH, k))
        for row in batch:
            s = sorted(set(row.tolist()))
            if len(s) == k:
                yield tuple(s)


def gen_partial_steiner(n: int, k: int, seed: int, retry_budget: int | None = None) -> Hypergraph:
    """Random greedy partial (n, k, 2)-system: accept uniform k-sets whose pairs are all unused,
    stop after ``retry_budget`` consecutive rejections (default n^2)."""
    if k < 3 or n < k:
        raise InputError(f"need k >= 3 and n >= k; got n={n} k={k}")
    budget = retry_budget if retry_budget is not None else max(100, n * n)
    rng = np.random.default_rng(seed)
    used: set[tuple[int, int]] = set()
    edges = []
    misses = 0
    for e in _random_ksets(rng, n, k):
        ps = list(combinations(e, 2))
        if any(p in used for p in ps):
            misses += 1
            if misses >= budget:
                break
            continue
        used.update(ps)
        edges.append(e)
        misses = 0
    return Hypergraph(k, n, edges)


def gen_random_bounded(n: int, d: int, k: int, seed: int, retry_budget: int | None = None) -> Hypergraph:
    """Random k-graph with maximum degree <= d: accept uniform k-sets whose vertices all have
    degree < d, stop after ``retry_budget`` consecutive rejections (default n^2)."""
    if d < 1:
        raise InputError(f"degree bound must be positive, got d={d}")
    if k < 1 or n < k:
        raise InputError(f"need 1 <= k <= n; got n={n} k={k}")
    budget = retry_budget if retry_budget is not None else max(100, n * n)
    rng = np.random.default_rng(seed)
    deg = [0] * n
    edges: set[tuple[int, ...]] = set()
    misses = 0
    for e in _random_ksets(rng, n, k):
        if e in edges or any(deg[v] >= d for v in e):
            misses += 1
            if misses >= budget:
                break
            continue
        edges.add(e)
        for v in e:
            deg[v] += 1
        misses = 0
    return Hypergraph(k, n, edges)
