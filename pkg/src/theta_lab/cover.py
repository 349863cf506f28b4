"""Set representations, clique covers and independent-set cover certificates.

A set representation and a clique cover describe the same object from two
sides: label ``s`` of a representation is the clique ``{v : s in S_v}``.  The
conversions below are constructive in both directions and never increase size.

A :class:`CoverCertificate` is a list of independent sets of G covering every
non-edge; its length upper-bounds ``vartheta(G)``.  Certificates produced by the
randomized algorithms can hold millions of sets, so they are stored as a CSR
pair of numpy arrays rather than a list of tuples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _ranks
from .errors import InputError, ParseError, PreconditionError
from .hypergraph import (
    Hypergraph,
    VertexSet,
    complement_edges,
    parse_header,
    to_mask,
    vertex_set,
)

# complement coverage uses a dense bitmap up to this many k-subsets
BITMAP_LIMIT = 2**31


@dataclass(frozen=True)
class Verdict:
    """Outcome of a validity check; falsy when a violation was found."""

    valid: bool
    violation: tuple | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid


OK = Verdict(True)


@dataclass(frozen=True)
class SetRepresentation:
    t: int
    labels: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(tuple(sorted(set(s))) for s in self.labels))
        for v, s in enumerate(self.labels):
            if s and (s[0] < 0 or s[-1] >= self.t):
                raise InputError(f"vertex {v} has a label outside [0, {self.t})")

    @property
    def n(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class CliqueCover:
    cliques: tuple[VertexSet, ...]

    def __post_init__(self):
        object.__setattr__(self, "cliques", tuple(vertex_set(c) for c in self.cliques))

    def __len__(self) -> int:
        return len(self.cliques)

    def __iter__(self) -> Iterator[VertexSet]:
        return iter(self.cliques)


class CoverCertificate:
    """Independent sets covering the complement of an instance.

    ``achieved_for`` is the fingerprint of the instance, ``provenance`` records
    how the certificate was produced (seed, algorithm, parameters) and is ignored
    by validity checks.  ``complete``/``uncovered``/``t_achieved`` are filled in
    by the randomized algorithms; ``t_achieved`` counts every trial drawn,
    including trials whose sample was too small to be materialised.
    """

    def __init__(
        self,
        sets: Iterable[Iterable[int]] = (),
        *,
        achieved_for: str | None = None,
        provenance: dict | None = None,
        complete: bool | None = None,
        uncovered: int | None = None,
        t_achieved: int | None = None,
        trial_index: np.ndarray | None = None,
        _arrays: tuple[np.ndarray, np.ndarray] | None = None,
    ):
        if _arrays is not None:
            indptr, indices = _arrays
        else:
            rows = [vertex_set(s) for s in sets]
            indptr = np.zeros(len(rows) + 1, dtype=np.int64)
            if rows:
                indptr[1:] = np.cumsum([len(r) for r in rows])
            indices = np.fromiter((v for r in rows for v in r), dtype=np.int64, count=int(indptr[-1]))
        self._indptr = np.asarray(indptr, dtype=np.int64)
        self._indices = np.asarray(indices)
        self.achieved_for = achieved_for
        self.provenance = dict(provenance or {})
        self.complete = complete
        self.uncovered = uncovered
        self.t_achieved = t_achieved
        self.trial_index = trial_index

    @classmethod
    def from_arrays(cls, indptr, indices, **kwargs) -> "CoverCertificate":
        return cls(_arrays=(indptr, indices), **kwargs)

    @property
    def t(self) -> int:
        return len(self._indptr) - 1

    def __len__(self) -> int:
        return self.t

    def __getitem__(self, j: int) -> VertexSet:
        if j < 0:
            j += self.t
        a, b = self._indptr[j], self._indptr[j + 1]
        return tuple(int(v) for v in self._indices[a:b])

    def __iter__(self) -> Iterator[VertexSet]:
        for j in range(self.t):
            yield self[j]

    @property
    def independent_sets(self) -> list[VertexSet]:
        return list(self)

    def sizes(self) -> np.ndarray:
        return np.diff(self._indptr)

    def membership(self, start: int, stop: int, n: int) -> np.ndarray:
        """Boolean (stop-start, n) membership matrix of sets ``start..stop-1``."""
        a, b = self._indptr[start], self._indptr[stop]
        rows = np.repeat(np.arange(stop - start), np.diff(self._indptr[start:stop + 1]))
        out = np.zeros((stop - start, n), dtype=bool)
        out[rows, self._indices[a:b]] = True
        return out

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return self._indptr, self._indices

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoverCertificate):
            return NotImplemented
        return (
            np.array_equal(self._indptr, other._indptr)
            and np.array_equal(self._indices, other._indices)
            and self.achieved_for == other.achieved_for
            and self.provenance == other.provenance
            and self.complete == other.complete
            and self.uncovered == other.uncovered
            and self.t_achieved == other.t_achieved
        )

    def __repr__(self) -> str:
        return (
            f"CoverCertificate(t={self.t}, complete={self.complete}, "
            f"t_achieved={self.t_achieved}, provenance={self.provenance})"
        )


# -- verification ------------------------------------------------------------


def _first_non_edge(G: Hypergraph, C: VertexSet) -> VertexSet | None:
    edges = set(G.edges)
    for s in combinations(C, G.k):
        if s not in edges:
            return s
    return None


def verify_clique_cover(G: Hypergraph, cover: CliqueCover | Sequence[Iterable[int]]) -> Verdict:
    """Every listed set is a clique (>= k vertices, all k-subsets edges) and every edge is covered."""
    cliques = cover.cliques if isinstance(cover, CliqueCover) else tuple(vertex_set(c) for c in cover)
    k = G.k
    for C in cliques:
        if C and C[-1] >= G.n:
            return Verdict(False, (C,), f"clique {C} has a vertex outside [0, {G.n})")
        if len(C) < k:
            return Verdict(False, (C,), f"set {C} has fewer than k = {k} vertices")
        bad = _first_non_edge(G, C)
        if bad is not None:
            return Verdict(False, (C, bad), f"clique {C} contains non-edge {bad}")
    masks = [to_mask(C) for C in cliques]
    for e, em in zip(G.edges, G.edge_masks):
        if not any(em & cm == em for cm in masks):
            return Verdict(False, (e,), f"edge {e} is not covered")
    return OK


def verify_representation(G: Hypergraph, rep: SetRepresentation) -> Verdict:
    """Check that k vertices share a label exactly when they form an edge."""
    if rep.n != G.n:
        return Verdict(False, None, f"representation covers {rep.n} vertices, instance has {G.n}")
    label_masks = [to_mask(s) for s in rep.labels]
    edges = set(G.edges)
    full = (1 << rep.t) - 1
    for s in combinations(range(G.n), G.k):
        common = full
        for v in s:
            common &= label_masks[v]
            if not common:
                break
        if bool(common) != (s in edges):
            if common:
                return Verdict(False, (s,), f"non-edge {s} shares a label")
            return Verdict(False, (s,), f"edge {s} has no common label")
    return OK


def _dependent_set(G: Hypergraph, cert: CoverCertificate, chunk: int = 1 << 15) -> tuple[int, VertexSet] | None:
    if not G.edges or cert.t == 0:
        return None
    E = G.edge_array
    for start in range(0, cert.t, chunk):
        stop = min(cert.t, start + chunk)
        M = cert.membership(start, stop, G.n)
        induced = M[:, E].all(axis=2)
        rows = np.flatnonzero(induced.any(axis=1))
        if rows.size:
            r = int(rows[0])
            e = G.edges[int(np.flatnonzero(induced[r])[0])]
            return start + r, e
    return None


def covered_ranks(cert: CoverCertificate, n: int, k: int, chunk: int = 1 << 15) -> Iterator[np.ndarray]:
    """Yield, chunk by chunk, lex ranks of the k-subsets contained in the certificate's sets."""
    for start in range(0, cert.t, chunk):
        stop = min(cert.t, start + chunk)
        ranks, _ = _ranks.subset_ranks(cert.membership(start, stop, n), k)
        yield ranks


def first_uncovered(G: Hypergraph, cert: CoverCertificate) -> VertexSet | None:
    """Lexicographically first non-edge of G not inside any certificate set."""
    n, k = G.n, G.k
    total = comb(n, k)
    edge_ranks = _ranks.rank_rows(G.edge_array, n, k)
    if total <= BITMAP_LIMIT:
        covered = np.zeros(total, dtype=bool)
        covered[edge_ranks] = True
        for ranks in covered_ranks(cert, n, k):
            covered[ranks] = True
        missing = np.flatnonzero(~covered)
        return _ranks.lex_unrank(int(missing[0]), n, k) if missing.size else None
    # sparse mode: sorted covered ranks, complement streamed in lex order
    parts = [edge_ranks] + list(covered_ranks(cert, n, k))
    have = np.unique(np.concatenate(parts))
    for s in complement_edges(G):
        r = _ranks.lex_rank(s, n, k)
        pos = np.searchsorted(have, r)
        if pos >= have.size or have[pos] != r:
            return s
    return None


def verify_theta_cover(G: Hypergraph, cert: CoverCertificate | Sequence[Iterable[int]]) -> Verdict:
    """Every set independent in G and every non-edge inside some set."""
    if not isinstance(cert, CoverCertificate):
        cert = CoverCertificate(cert)
    if cert._indices.size and (cert._indices.min() < 0 or cert._indices.max() >= G.n):
        return Verdict(False, None, f"certificate uses a vertex outside [0, {G.n})")
    bad = _dependent_set(G, cert)
    if bad is not None:
        j, e = bad
        return Verdict(False, (j, e), f"set #{j} {cert[j]} contains edge {e}")
    miss = first_uncovered(G, cert)
    if miss is not None:
        return Verdict(False, (miss,), f"non-edge {miss} is not covered")
    return OK


def lint_certificate(cert: CoverCertificate) -> list[str]:
    """Style warnings that do not affect validity (empty sets mean wasted trials)."""
    empties = int((cert.sizes() == 0).sum())
    if empties:
        return [f"{empties} empty independent set(s) in certificate"]
    return []


# -- conversions --------------------------------------------------------------


def representation_to_cover(G: Hypergraph, rep: SetRepresentation) -> CliqueCover:
    """Label classes ``C(s) = {v : s in S_v}`` with at least k members form a clique cover."""
    verdict = verify_representation(G, rep)
    if not verdict:
        raise PreconditionError(f"invalid representation: {verdict.reason}", verdict.violation)
    classes: list[list[int]] = [[] for _ in range(rep.t)]
    for v, labels in enumerate(rep.labels):
        for s in labels:
            classes[s].append(v)
    return CliqueCover(tuple(tuple(c) for c in classes if len(c) >= G.k))


def cover_to_representation(G: Hypergraph, cover: CliqueCover) -> SetRepresentation:
    """Give every vertex the indices of the cliques containing it."""
    verdict = verify_clique_cover(G, cover)
    if not verdict:
        raise PreconditionError(f"invalid clique cover: {verdict.reason}", verdict.violation)
    labels: list[list[int]] = [[] for _ in range(G.n)]
    for idx, C in enumerate(cover.cliques):
        for v in C:
            labels[v].append(idx)
    return SetRepresentation(len(cover.cliques), tuple(tuple(x) for x in labels))


def certificate_as_cover(cert: CoverCertificate) -> CliqueCover:
    """Read certificate sets as cliques of the complement (the vartheta/Theta duality)."""
    return CliqueCover(tuple(cert))


def blowup_base(G: Hypergraph, groups: Sequence[Iterable[int]]) -> Hypergraph:
    """Recover the 2-graph F whose blowup along ``groups`` is G."""
    groups = [vertex_set(g, G.n) for g in groups]
    owner = {}
    for i, g in enumerate(groups):
        for v in g:
            if v in owner:
                raise PreconditionError(f"vertex {v} lies in groups {owner[v]} and {i}")
            owner[v] = i
    if len(owner) != G.n:
        raise PreconditionError("groups do not partition the vertex set")
    pairs = []
    for e in G.edges:
        parts = sorted({owner[v] for v in e})
        if len(parts) != 2 or set(e) != set(groups[parts[0]]) | set(groups[parts[1]]):
            raise PreconditionError(f"edge {e} is not a union of two groups", e)
        pairs.append(tuple(parts))
    return Hypergraph(2, len(groups), pairs)


def project_representation(
    G: Hypergraph, cert: CoverCertificate, groups: Sequence[Iterable[int]]
) -> CoverCertificate:
    """Map each set I_j of a blowup certificate to ``{i : V_i ⊆ I_j}``.

    The result covers the complement of the base 2-graph and has the same length;
    empty projections are kept.
    """
    F = blowup_base(G, groups)
    verdict = verify_theta_cover(G, cert)
    if not verdict:
        raise PreconditionError(f"certificate invalid for the blowup: {verdict.reason}", verdict.violation)
    group_masks = [to_mask(g) for g in groups]
    projected = []
    for I in cert:
        im = to_mask(I)
        projected.append([i for i, gm in enumerate(group_masks) if gm & im == gm])
    prov = dict(cert.provenance)
    prov["projected_from"] = cert.achieved_for or G.fingerprint
    return CoverCertificate(projected, achieved_for=F.fingerprint, provenance=prov)


# -- text formats --------------------------------------------------------------


def format_representation(rep: SetRepresentation) -> str:
    lines = [f"{rep.t} {rep.n}"]
    lines.extend(" ".join(map(str, s)) for s in rep.labels)
    return "\n".join(lines) + "\n"


def _header_lines(items) -> list[str]:
    return [f"# {key}={value}" for key, value in items]


def format_certificate(cert: CoverCertificate) -> str:
    items = []
    if cert.achieved_for is not None:
        items.append(("instance", cert.achieved_for))
    items.extend(cert.provenance.items())
    if cert.complete is not None:
        items.append(("complete", str(cert.complete).lower()))
    if cert.uncovered is not None:
        items.append(("uncovered", cert.uncovered))
    if cert.t_achieved is not None:
        items.append(("t_achieved", cert.t_achieved))
    lines = _header_lines(items)
    lines.append(str(cert.t))
    lines.extend(" ".join(map(str, s)) for s in cert)
    return "\n".join(lines) + "\n"


def format_clique_cover(cover: CliqueCover) -> str:
    lines = ["# kind=clique-cover", str(len(cover))]
    lines.extend(" ".join(map(str, c)) for c in cover)
    return "\n".join(lines) + "\n"


def _int_line(line: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise ParseError(f"non-integer token in {line!r}", lineno) from None


def parse_artifact(text: str):
    """Parse a representation, certificate or clique-cover file.

    ``t n`` on the first body line means a representation; a lone ``t`` means a
    list of vertex sets, read as a clique cover when the header says
    ``kind=clique-cover`` and as a certificate otherwise.
    """
    lines = text.splitlines()
    header, i = parse_header(lines)
    if i >= len(lines):
        raise ParseError("missing size line", i + 1)
    first = _int_line(lines[i], i + 1)
    body = lines[i + 1:]
    if len(first) == 2:
        t, n = first
        if len(body) != n:
            raise ParseError(f"expected {n} label lines, found {len(body)}", i + 1)
        labels = []
        for j, line in enumerate(body, start=i + 2):
            row = _int_line(line, j)
            if any(not 0 <= s < t for s in row):
                raise ParseError(f"label outside [0, {t})", j)
            if any(a >= b for a, b in zip(row, row[1:])):
                raise ParseError("labels must be strictly increasing", j)
            labels.append(tuple(row))
        return SetRepresentation(t, tuple(labels))
    if len(first) != 1:
        raise ParseError(f"expected 't' or 't n', got {lines[i]!r}", i + 1)
    (t,) = first
    if len(body) != t:
        raise ParseError(f"expected {t} set lines, found {len(body)}", i + 1)
    sets = []
    for j, line in enumerate(body, start=i + 2):
        row = _int_line(line, j)
        if any(a >= b for a, b in zip(row, row[1:])):
            raise ParseError("vertices must be strictly increasing", j)
        if row and row[0] < 0:
            raise ParseError("negative vertex id", j)
        sets.append(row)
    if header.pop("kind", None) == "clique-cover":
        return CliqueCover(tuple(tuple(s) for s in sets))
    achieved_for = header.pop("instance", None)
    complete = header.pop("complete", None)
    uncovered = header.pop("uncovered", None)
    t_achieved = header.pop("t_achieved", None)
    return CoverCertificate(
        sets,
        achieved_for=achieved_for,
        provenance=header,
        complete=None if complete is None else complete == "true",
        uncovered=None if uncovered is None else int(uncovered),
        t_achieved=None if t_achieved is None else int(t_achieved),
    )


def load_artifact(path):
    with open(path) as fh:
        return parse_artifact(fh.read())
