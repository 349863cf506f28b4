"""Randomized covers of the complement by independent sets.

Both algorithms draw random vertex samples ``W_j`` (each vertex kept
independently with probability p) and turn each sample into an independent set
``I_j``:

* :func:`balanced_cover` deletes every vertex of every edge induced by ``W_j``;
* :func:`general_cover` runs the cleaning loop (:func:`clean`) driven by the
  auxiliary (k-1)-graph of high-degree tuples.

Trials are drawn until every non-edge lies inside some ``I_j`` (adaptive mode)
or for the fixed trial count of the matching upper bound (fixed-t mode).

Random streams
--------------
Trials are grouped into blocks of ``L`` consecutive indices.  Block ``b`` is
generated by ``Philox(key=SeedSequence(seed), counter=[0, b, 0, 0])``, so its
content depends only on (seed, b) and blocks can be produced in any order or in
parallel with identical results.  A sample with fewer than k vertices cannot
contain a non-edge, so blocks only materialise the trials whose sample has at
least ``min_size = k`` vertices: the number of such trials in a block is
Binomial(L, q) with q = P(Bin(n, p) >= k), their positions are uniform, the
size of each is drawn from Bin(n, p) conditioned on >= k, and the vertices are
then uniform given the size.  This is the same joint law as drawing every
trial, and keeps very small p (millions of empty trials per useful one)
tractable.  ``t_achieved`` still counts every trial.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Callable, Iterator

import mpmath
import numpy as np
from scipy import stats

from . import _ranks
from .cover import BITMAP_LIMIT, CoverCertificate
from .errors import InputError, PreconditionError
from .hypergraph import Hypergraph, VertexSet, balance_violations, complement_count, max_degree, vertex_set

BLOCK_TRIALS = 2048
MODES = ("adaptive", "fixed-t")
DEFAULT_CAP_FACTOR = 10


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("THETA_LAB_THREADS", "1")))
    except ValueError:
        return 1


# -- constants ------------------------------------------------------------------


def balanced_probability(d: int, k: int) -> float:
    return 1.0 / (2 * k * d ** (1.0 / (k - 1)))


def balanced_constant(k: int) -> int:
    return 2 ** (k + 2) * k ** (k + 1)


def balanced_trials(n: int, d: int, k: int) -> int:
    """ceil(2^(k+2) k^(k+1) d^(k/(k-1)) ln n)."""
    with mpmath.workdps(50):
        value = balanced_constant(k) * mpmath.mpf(d) ** (mpmath.mpf(k) / (k - 1)) * mpmath.log(n)
        return int(mpmath.ceil(value))


def general_delta(k: int) -> float:
    return 1.0 / ((k - 1) * 2 ** (k + 2))


def general_epsilon(k: int) -> float:
    return 1.0 / 2 ** (k + 2)


def general_probability(d: int, k: int) -> float:
    return general_delta(k) / math.sqrt(d)


def general_constant(k: int) -> int:
    """2k / delta^k, an integer: 2k ((k-1) 2^(k+2))^k."""
    return 2 * k * ((k - 1) * 2 ** (k + 2)) ** k


def general_trials(n: int, d: int, k: int) -> int:
    """ceil((2k / delta^k) d^(k/2) ln n)."""
    with mpmath.workdps(50):
        value = general_constant(k) * mpmath.mpf(d) ** (mpmath.mpf(k) / 2) * mpmath.log(n)
        return int(mpmath.ceil(value))


def success_lower_bound(d: int, k: int) -> float:
    """Per-trial lower bound (1/2)(delta / sqrt d)^k on P(a fixed non-edge lies in I_j)."""
    return 0.5 * general_probability(d, k) ** k


@dataclass(frozen=True)
class BalancedConfig:
    d: int
    seed: int = 0
    t_cap: int | None = None
    mode: str = "adaptive"
    workers: int | None = None

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or self.d < 2:
            raise InputError(f"balanced algorithm needs an integer d >= 2, got {self.d!r}")
        if self.mode not in MODES:
            raise InputError(f"mode must be one of {MODES}, got {self.mode!r}")

    def probability(self, k: int) -> float:
        return balanced_probability(self.d, k)

    def trials(self, n: int, k: int) -> int:
        return balanced_trials(n, self.d, k)


@dataclass(frozen=True)
class GeneralConfig:
    d: int
    seed: int = 0
    t_cap: int | None = None
    mode: str = "adaptive"
    workers: int | None = None

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or self.d < 3:
            raise InputError(f"general algorithm needs an integer d >= 3, got {self.d!r}")
        if self.mode not in MODES:
            raise InputError(f"mode must be one of {MODES}, got {self.mode!r}")

    def probability(self, k: int) -> float:
        return general_probability(self.d, k)

    def trials(self, n: int, k: int) -> int:
        return general_trials(n, self.d, k)


# -- sampling ---------------------------------------------------------------------


class TrialSampler:
    """Blocked, counter-based sampler of Bernoulli(p) vertex subsets of range(n).

    With ``min_size = 0`` every trial is materialised; with ``min_size = s``
    only trials whose sample has at least s vertices are.
    """

    def __init__(self, n: int, p: float, seed: int, min_size: int = 0, block_trials: int = BLOCK_TRIALS):
        if not 0.0 < p < 1.0:
            raise InputError(f"sampling probability must lie in (0, 1), got {p}")
        self.n = n
        self.p = p
        self.min_size = min_size
        self.key = np.random.SeedSequence(seed).generate_state(2, np.uint64)
        if min_size <= 0:
            self.q = 1.0
        else:
            self.q = float(stats.binom.sf(min_size - 1, n, p)) if min_size <= n else 0.0
        if self.q <= 0.0:
            raise InputError(f"samples of {n} vertices never reach {min_size} members")
        lo = max(min_size, 0)
        self.sizes = np.arange(lo, n + 1)
        pmf = stats.binom.pmf(self.sizes, n, p)
        self.size_pmf = pmf / pmf.sum()
        if self.q >= 1.0:
            self.block_length = block_trials
        else:
            exponent = round(math.log2(block_trials / self.q))
            self.block_length = 2 ** min(max(exponent, 0), 60)

    def block(self, b: int) -> tuple[np.ndarray, np.ndarray]:
        """(trial indices, boolean membership rows) of the materialised trials of block b."""
        rng = np.random.Generator(np.random.Philox(key=self.key, counter=[0, b, 0, 0]))
        L = self.block_length
        if self.q >= 1.0:
            pos = np.arange(L, dtype=np.int64)
        else:
            count = int(rng.binomial(L, self.q))
            pos = np.sort(rng.choice(L, size=count, replace=False)).astype(np.int64)
        U = pos.size
        sizes = rng.choice(self.sizes, size=U, p=self.size_pmf)
        keys = rng.random((U, self.n))
        if U:
            ordered = np.sort(keys, axis=1)
            thr = ordered[np.arange(U), np.maximum(sizes, 1) - 1]
            members = (keys <= thr[:, None]) & (sizes > 0)[:, None]
        else:
            members = np.zeros((0, self.n), dtype=bool)
        return b * L + pos, members

    def blocks(self, stop: int | None = None, workers: int = 1) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        """Blocks in order, truncated at trial ``stop``; ``workers`` blocks are built concurrently."""
        L = self.block_length
        last = None if stop is None else -(-stop // L)
        b = 0
        pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
        try:
            while last is None or b < last:
                batch = range(b, b + workers if last is None else min(b + workers, last))
                results = pool.map(self.block, batch) if pool else map(self.block, batch)
                for trials, members in results:
                    if stop is not None and trials.size and trials[-1] >= stop:
                        keep = trials < stop
                        trials, members = trials[keep], members[keep]
                    yield trials, members
                b = batch.stop
        finally:
            if pool:
                pool.shutdown()


# -- auxiliary graph and cleaning ------------------------------------------------------


@dataclass(frozen=True)
class AuxGraph:
    """(k-1)-sets of G whose degree is at least sqrt(d)."""

    graph: Hypergraph
    d: int
    base: Hypergraph = field(repr=False, compare=False)

    @cached_property
    def forced_vertex(self) -> tuple[int, ...]:
        """Per edge of ``base``: the vertex outside its unique H-subset, or -1 if it has 0 or >= 2."""
        members = self.graph._edge_set
        out = []
        for g in self.base.edges:
            hits = [S for S in combinations(g, len(g) - 1) if S in members]
            out.append(next(iter(set(g) - set(hits[0]))) if len(hits) == 1 else -1)
        return tuple(out)


def build_aux_graph(G: Hypergraph, d: int) -> AuxGraph:
    """H = {S : |S| = k-1, deg_G(S) >= sqrt(d)}, tested exactly as deg^2 >= d."""
    if d < 1:
        raise InputError(f"d must be positive, got {d}")
    degs = G.subset_degrees(G.k - 1)
    tuples = [S for S, c in degs.items() if c * c >= d]
    return AuxGraph(Hypergraph(G.k - 1, G.n, tuples), int(d), G)


def _forced_table(G: Hypergraph, H: AuxGraph) -> tuple[int, ...]:
    if H.base is G or H.base == G:
        return H.forced_vertex
    return AuxGraph(H.graph, H.d, G).forced_vertex


def _clean_indices(W: VertexSet, G: Hypergraph, forced: tuple[int, ...]) -> VertexSet:
    k = G.k
    hits: dict[int, int] = {}
    for v in W:
        for j in G.incidence[v]:
            hits[j] = hits.get(j, 0) + 1
    # edge indices follow lexicographic edge order
    alive = sorted(j for j, c in hits.items() if c == k)
    X = set(W)
    while alive:
        j = next((j for j in alive if forced[j] >= 0), None)
        if j is not None:
            v = forced[j]
        else:
            v = G.edges[alive[0]][-1]
        X.discard(v)
        alive = [i for i in alive if v not in G.edges[i]]
    return tuple(sorted(X))


def clean(W, G: Hypergraph, H: AuxGraph) -> VertexSet:
    """Delete vertices from W until it is independent.

    While an edge is induced: if some induced edge contains exactly one
    (k-1)-subset S in H, drop its vertex outside S (the lexicographically first
    such edge is used); otherwise drop the largest vertex of the
    lexicographically first induced edge.
    """
    return _clean_indices(vertex_set(W, G.n), G, _forced_table(G, H))


# -- trial kernels ----------------------------------------------------------------


def _induced(members: np.ndarray, G: Hypergraph) -> np.ndarray:
    """Boolean (rows, m): edge j lies inside row r."""
    E = G.edge_array
    rows = members.shape[0]
    if not G.edges:
        return np.zeros((rows, 0), dtype=bool)
    step = max(1, (1 << 24) // (len(G.edges) * G.k))
    out = np.empty((rows, len(G.edges)), dtype=bool)
    for a in range(0, rows, step):
        out[a:a + step] = members[a:a + step][:, E].all(axis=2)
    return out


def _balanced_kernel(G: Hypergraph) -> Callable[[np.ndarray], np.ndarray]:
    inc = np.zeros((len(G.edges), G.n), dtype=np.float32)
    if G.edges:
        inc[np.repeat(np.arange(len(G.edges)), G.k), G.edge_array.ravel()] = 1.0

    def kernel(members: np.ndarray) -> np.ndarray:
        if not G.edges or members.shape[0] == 0:
            return members
        induced = _induced(members, G)
        deleted = (induced.astype(np.float32) @ inc) > 0
        return members & ~deleted

    return kernel


def _general_kernel(G: Hypergraph, H: AuxGraph) -> Callable[[np.ndarray], np.ndarray]:
    forced = _forced_table(G, H)

    def kernel(members: np.ndarray) -> np.ndarray:
        if not G.edges or members.shape[0] == 0:
            return members
        dirty = np.flatnonzero(_induced(members, G).any(axis=1))
        if dirty.size == 0:
            return members
        out = members.copy()
        for r in dirty:
            W = tuple(int(v) for v in np.flatnonzero(members[r]))
            out[r] = False
            out[r, list(_clean_indices(W, G, forced))] = True
        return out

    return kernel


# -- coverage ------------------------------------------------------------------------


class _Coverage:
    """Which non-edges are already inside some emitted set."""

    def __init__(self, G: Hypergraph):
        self.n, self.k = G.n, G.k
        self.total = comb(G.n, G.k)
        self.remaining = complement_count(G)
        edge_ranks = _ranks.rank_rows(G.edge_array, G.n, G.k)
        if self.total <= BITMAP_LIMIT:
            self.bitmap = np.zeros(self.total, dtype=bool)
            self.bitmap[edge_ranks] = True
            self.seen = None
        else:
            self.bitmap = None
            self.seen = set(int(r) for r in edge_ranks)

    def absorb(self, members: np.ndarray) -> int | None:
        """Mark the rows' k-subsets covered.  If that completes the cover,
        return the first row index by which every non-edge was covered."""
        ranks, rows = _ranks.subset_ranks(members, self.k)
        if ranks.size == 0:
            return None
        if self.bitmap is not None:
            fresh = ~self.bitmap[ranks]
            ranks, rows = ranks[fresh], rows[fresh]
            order = np.lexsort((rows, ranks))
            ranks, rows = ranks[order], rows[order]
            first = np.ones(ranks.size, dtype=bool)
            first[1:] = ranks[1:] != ranks[:-1]
            new_ranks, new_rows = ranks[first], rows[first]
            self.bitmap[new_ranks] = True
        else:
            new: dict[int, int] = {}
            for r, row in zip(ranks.tolist(), rows.tolist()):
                if r not in self.seen and (r not in new or row < new[r]):
                    new[r] = row
            self.seen.update(new)
            new_ranks = np.fromiter(new.keys(), dtype=np.int64, count=len(new))
            new_rows = np.fromiter(new.values(), dtype=np.int64, count=len(new))
        self.remaining -= int(new_ranks.size)
        if self.remaining == 0 and new_rows.size:
            return int(new_rows.max())
        return None


# -- driver ------------------------------------------------------------------------------


def _run(G: Hypergraph, p: float, kernel, mode: str, t_fixed: int, t_cap: int | None, seed: int,
         workers: int | None, provenance: dict) -> CoverCertificate:
    coverage = _Coverage(G)
    if mode == "fixed-t":
        stop = t_fixed
    else:
        stop = t_cap if t_cap is not None else DEFAULT_CAP_FACTOR * t_fixed
    provenance = dict(provenance, seed=seed, mode=mode, p=repr(p), t_limit=stop)
    workers = workers or default_workers()

    kept_trials: list[np.ndarray] = []
    kept_sizes: list[np.ndarray] = []
    kept_indices: list[np.ndarray] = []
    t_achieved = 0 if coverage.remaining == 0 and mode == "adaptive" else stop

    if t_achieved:
        sampler = TrialSampler(G.n, p, seed, min_size=G.k)
        for trials, members in sampler.blocks(stop, workers):
            if trials.size == 0:
                continue
            sets = kernel(members)
            done_row = coverage.absorb(sets)
            if done_row is not None and mode == "adaptive":
                trials, sets = trials[:done_row + 1], sets[:done_row + 1]
                t_achieved = int(trials[-1]) + 1
            kept_trials.append(trials)
            kept_sizes.append(sets.sum(axis=1))
            kept_indices.append(np.nonzero(sets)[1].astype(np.int32))
            if done_row is not None and mode == "adaptive":
                break

    sizes = np.concatenate(kept_sizes) if kept_sizes else np.zeros(0, dtype=np.int64)
    indptr = np.zeros(sizes.size + 1, dtype=np.int64)
    np.cumsum(sizes, out=indptr[1:])
    indices = np.concatenate(kept_indices) if kept_indices else np.zeros(0, dtype=np.int32)
    trial_index = np.concatenate(kept_trials) if kept_trials else np.zeros(0, dtype=np.int64)
    return CoverCertificate.from_arrays(
        indptr,
        indices,
        achieved_for=G.fingerprint,
        provenance=provenance,
        complete=coverage.remaining == 0,
        uncovered=coverage.remaining,
        t_achieved=t_achieved,
        trial_index=trial_index,
    )


def balanced_cover(G: Hypergraph, cfg: BalancedConfig) -> CoverCertificate:
    """Cover the complement of a d-balanced G with sets ``W_j`` minus all vertices of induced edges."""
    bad = balance_violations(G, cfg.d)
    if bad:
        detail = ", ".join(f"Δ_{i}={v}" for i, v in bad)
        raise PreconditionError(f"instance is not {cfg.d}-balanced: {detail}", bad)
    k = G.k
    p = cfg.probability(k)
    prov = {"algorithm": "balanced", "d": cfg.d, "k": k}
    return _run(G, p, _balanced_kernel(G), cfg.mode, cfg.trials(max(G.n, 2), k), cfg.t_cap,
                cfg.seed, cfg.workers, prov)


def general_cover(G: Hypergraph, cfg: GeneralConfig) -> CoverCertificate:
    """Cover the complement of G with Δ(G) <= d using the cleaning strategy."""
    delta1 = max_degree(G, 1)
    if delta1 > cfg.d:
        raise PreconditionError(f"maximum degree Δ={delta1} exceeds d={cfg.d}", (1, delta1))
    k = G.k
    if k < 2:
        raise InputError("general algorithm needs k >= 2")
    H = build_aux_graph(G, cfg.d)
    p = cfg.probability(k)
    prov = {"algorithm": "general", "d": cfg.d, "k": k}
    return _run(G, p, _general_kernel(G, H), cfg.mode, cfg.trials(max(G.n, 2), k), cfg.t_cap,
                cfg.seed, cfg.workers, prov)


def trial_sets(G: Hypergraph, algorithm: str, d: int, seed: int, trials: int,
               min_size: int = 0) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Raw (trial index, independent-set rows) blocks of one algorithm, without coverage tracking.

    Used for Monte Carlo estimates of per-trial probabilities.
    """
    k = G.k
    if algorithm == "balanced":
        p = balanced_probability(d, k)
        kernel = _balanced_kernel(G)
    elif algorithm == "general":
        p = general_probability(d, k)
        kernel = _general_kernel(G, build_aux_graph(G, d))
    else:
        raise InputError(f"unknown algorithm {algorithm!r}")
    sampler = TrialSampler(G.n, p, seed, min_size=min_size)
    for idx, members in sampler.blocks(trials):
        yield idx, kernel(members)
