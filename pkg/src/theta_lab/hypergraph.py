"""k-uniform hypergraphs on contiguous vertex ids with degree and clique queries.

Vertex sets are plain sorted tuples of ints.  Internally every edge also has a
Python-int bitmask so that subset tests are single ``&`` operations.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Iterable, Iterator

import numpy as np

from .errors import InputError, ParseError

VertexSet = tuple[int, ...]


def vertex_set(vertices: Iterable[int], n: int | None = None) -> VertexSet:
    """Normalise an iterable of vertex ids to a sorted duplicate-free tuple."""
    vs = tuple(sorted(int(v) for v in vertices))
    for a, b in zip(vs, vs[1:]):
        if a == b:
            raise InputError(f"duplicate vertex {a} in {vs}")
    if vs and vs[0] < 0:
        raise InputError(f"negative vertex id {vs[0]}")
    if n is not None and vs and vs[-1] >= n:
        raise InputError(f"vertex {vs[-1]} out of range [0, {n})")
    return vs


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def from_mask(mask: int) -> VertexSet:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return tuple(out)


@dataclass(frozen=True)
class DegreeProfile:
    """Maximum i-set degrees ``delta[i-1] = Δ_i`` for i = 1..k."""

    delta: tuple[int, ...]

    def __getitem__(self, i: int) -> int:
        return self.delta[i - 1]


class Hypergraph:
    """Immutable k-uniform hypergraph on vertices ``0..n-1``.

    Edges are stored as a lexicographically sorted tuple of sorted tuples.
    Isolated vertices are allowed; ``n`` is never inferred from the edges.
    """

    def __init__(self, k: int, n: int, edges: Iterable[Iterable[int]] = ()):
        k = int(k)
        n = int(n)
        if k < 1:
            raise InputError(f"uniformity k must be positive, got {k}")
        if n < 0:
            raise InputError(f"vertex count must be non-negative, got {n}")
        normalised = set()
        for e in edges:
            ev = vertex_set(e, n)
            if len(ev) != k:
                raise InputError(f"edge {ev} has {len(ev)} vertices, expected {k}")
            if ev in normalised:
                raise InputError(f"duplicate edge {ev}")
            normalised.add(ev)
        self.k = k
        self.n = n
        self.edges: tuple[VertexSet, ...] = tuple(sorted(normalised))
        self._edge_set = normalised

    @classmethod
    def complete(cls, k: int, n: int) -> "Hypergraph":
        return cls(k, n, combinations(range(n), k))

    @classmethod
    def empty(cls, k: int, n: int) -> "Hypergraph":
        return cls(k, n, ())

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[VertexSet]:
        return iter(self.edges)

    def __contains__(self, edge) -> bool:
        return tuple(sorted(edge)) in self._edge_set

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.k, self.n, self.edges) == (other.k, other.n, other.edges)

    def __hash__(self) -> int:
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((self.k, self.n, self.edges))

    def __repr__(self) -> str:
        return f"Hypergraph(k={self.k}, n={self.n}, m={len(self.edges)})"

    @cached_property
    def edge_masks(self) -> tuple[int, ...]:
        return tuple(to_mask(e) for e in self.edges)

    @cached_property
    def edge_array(self) -> np.ndarray:
        arr = np.array(self.edges, dtype=np.intp).reshape(len(self.edges), self.k)
        arr.setflags(write=False)
        return arr

    @cached_property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        """Edge indices containing each vertex."""
        inc: list[list[int]] = [[] for _ in range(self.n)]
        for idx, e in enumerate(self.edges):
            for v in e:
                inc[v].append(idx)
        return tuple(tuple(x) for x in inc)

    def subset_degrees(self, i: int) -> Counter:
        """Map every i-set contained in some edge to its degree (cached per i)."""
        cache = self.__dict__.setdefault("_subset_degree_cache", {})
        if i not in cache:
            cache[i] = Counter(s for e in self.edges for s in combinations(e, i))
        return cache[i]

    def complement(self) -> "Hypergraph":
        return Hypergraph(self.k, self.n, complement_edges(self))

    @cached_property
    def fingerprint(self) -> str:
        return hashlib.sha256(format_hypergraph(self).encode()).hexdigest()[:16]


def _check_subset(G: Hypergraph, S) -> VertexSet:
    return vertex_set(S, G.n)


def degree(G: Hypergraph, S: Iterable[int]) -> int:
    """Number of edges of G containing S."""
    S = _check_subset(G, S)
    if len(S) > G.k:
        raise InputError(f"|S| = {len(S)} exceeds uniformity {G.k}")
    if len(S) == G.k:
        return int(S in G._edge_set)
    if len(S) == 0:
        return len(G.edges)
    if "_subset_degree_cache" in G.__dict__ and len(S) in G.__dict__["_subset_degree_cache"]:
        return G.__dict__["_subset_degree_cache"][len(S)].get(S, 0)
    sm = to_mask(S)
    return sum(1 for em in G.edge_masks if em & sm == sm)


def max_degree(G: Hypergraph, i: int) -> int:
    """Δ_i(G): the largest degree of an i-set, 0 for an empty hypergraph."""
    if not 1 <= i <= G.k:
        raise InputError(f"i = {i} outside [1, {G.k}]")
    if not G.edges:
        return 0
    if i == G.k:
        return 1
    return max(G.subset_degrees(i).values())


def degree_profile(G: Hypergraph) -> DegreeProfile:
    return DegreeProfile(tuple(max_degree(G, i) for i in range(1, G.k + 1)))


def balance_violations(G: Hypergraph, d: int) -> list[tuple[int, int]]:
    """Pairs (i, Δ_i) with Δ_i > d^((k-i)/(k-1)), tested exactly as Δ_i^(k-1) > d^(k-i)."""
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
        raise InputError(f"d must be a positive integer, got {d!r}")
    d = int(d)
    if d < 1:
        raise InputError(f"d must be a positive integer, got {d}")
    k = G.k
    out = []
    for i in range(1, k + 1):
        di = max_degree(G, i)
        if k == 1:
            continue
        if di ** (k - 1) > d ** (k - i):
            out.append((i, di))
    return out


def is_d_balanced(G: Hypergraph, d: int) -> bool:
    return not balance_violations(G, d)


def complement_edges(G: Hypergraph) -> Iterator[VertexSet]:
    """Lazily yield the k-subsets of [0, n) that are not edges, in lexicographic order."""
    edges = G._edge_set
    for s in combinations(range(G.n), G.k):
        if s not in edges:
            yield s


def complement_count(G: Hypergraph) -> int:
    return comb(G.n, G.k) - len(G.edges)


def is_independent(G: Hypergraph, S: Iterable[int]) -> bool:
    """True iff no edge of G lies inside S."""
    S = _check_subset(G, S)
    if len(S) < G.k:
        return True
    sm = to_mask(S)
    return not any(em & sm == em for em in G.edge_masks)


def is_clique(G: Hypergraph, C: Iterable[int]) -> bool:
    """True iff every k-subset of C is an edge.  Sets smaller than k are rejected."""
    C = _check_subset(G, C)
    if len(C) < G.k:
        raise InputError(f"cliques need at least k = {G.k} vertices, got {len(C)}")
    edges = G._edge_set
    return all(s in edges for s in combinations(C, G.k))


# -- text format -------------------------------------------------------------


def format_hypergraph(G: Hypergraph, header: dict | None = None) -> str:
    lines = [f"# {key}={value}" for key, value in (header or {}).items()]
    lines.append(f"{G.k} {G.n} {len(G.edges)}")
    lines.extend(" ".join(map(str, e)) for e in G.edges)
    return "\n".join(lines) + "\n"


def parse_header(lines: list[str]) -> tuple[dict, int]:
    """Collect leading ``# key=value`` comment lines; return (header, first body line index)."""
    header = {}
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        body = lines[i][1:].strip()
        if "=" in body:
            key, value = body.split("=", 1)
            header[key.strip()] = value.strip()
        i += 1
    return header, i


def _ints(line: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise ParseError(f"non-integer token in {line!r}", lineno) from None


def parse_hypergraph(text: str) -> tuple[Hypergraph, dict]:
    """Parse the ``k n m`` instance format; returns the hypergraph and its comment header."""
    lines = text.splitlines()
    header, i = parse_header(lines)
    if i >= len(lines):
        raise ParseError("missing 'k n m' line", i + 1)
    first = _ints(lines[i], i + 1)
    if len(first) != 3:
        raise ParseError(f"expected 'k n m', got {lines[i]!r}", i + 1)
    k, n, m = first
    if k < 1 or n < 0 or m < 0:
        raise ParseError(f"invalid header values k={k} n={n} m={m}", i + 1)
    body = lines[i + 1:]
    while body and not body[-1].strip():
        body.pop()
    if len(body) != m:
        raise ParseError(f"header announces {m} edges, found {len(body)} lines", i + 1)
    seen = set()
    edges = []
    for j, line in enumerate(body, start=i + 2):
        e = _ints(line, j)
        if len(e) != k:
            raise ParseError(f"edge has {len(e)} vertices, expected {k}", j)
        if any(a >= b for a, b in zip(e, e[1:])):
            raise ParseError(f"edge {e} is not strictly increasing", j)
        if e[0] < 0 or e[-1] >= n:
            raise ParseError(f"edge {e} has a vertex outside [0, {n})", j)
        t = tuple(e)
        if t in seen:
            raise ParseError(f"duplicate edge {e}", j)
        seen.add(t)
        edges.append(t)
    return Hypergraph(k, n, edges), header


def load_hypergraph(path) -> tuple[Hypergraph, dict]:
    with open(path) as fh:
        return parse_hypergraph(fh.read())


def dump_hypergraph(G: Hypergraph, path, header: dict | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(format_hypergraph(G, header))
