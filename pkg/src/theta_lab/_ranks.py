"""Lexicographic ranking of k-subsets of range(n).

The rank of a sorted k-tuple ``a`` is its position in ``itertools.combinations(range(n), k)``.
It is computed through the reflected colex identity::

    lex_rank(a) = C(n, k) - 1 - sum_i C(n - 1 - a[i], k - i)

which turns ranking into a table lookup and lets numpy rank whole batches.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np


@lru_cache(maxsize=64)
def rank_table(n: int, k: int) -> np.ndarray:
    """``table[i, v] = C(n - 1 - v, k - i)`` as int64, shape (k, n)."""
    table = np.zeros((k, n), dtype=np.int64)
    for i in range(k):
        for v in range(n):
            table[i, v] = comb(n - 1 - v, k - i)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=256)
def combo_index(s: int, k: int) -> np.ndarray:
    """All k-combinations of range(s) in lexicographic order, shape (C(s,k), k)."""
    rows = list(combinations(range(s), k))
    out = np.array(rows, dtype=np.intp).reshape(len(rows), k)
    out.setflags(write=False)
    return out


def lex_rank(subset, n: int, k: int) -> int:
    total = comb(n, k)
    return total - 1 - sum(comb(n - 1 - v, k - i) for i, v in enumerate(subset))


def lex_unrank(rank: int, n: int, k: int) -> tuple[int, ...]:
    out = []
    v = 0
    for i in range(k):
        while True:
            block = comb(n - 1 - v, k - i - 1)
            if rank < block:
                break
            rank -= block
            v += 1
        out.append(v)
        v += 1
    return tuple(out)


def rank_rows(rows: np.ndarray, n: int, k: int) -> np.ndarray:
    """Lex ranks of sorted k-tuples given as an (r, k) integer array."""
    rows = np.asarray(rows, dtype=np.intp)
    if rows.size == 0:
        return np.zeros(0, dtype=np.int64)
    table = rank_table(n, k)
    acc = np.zeros(rows.shape[0], dtype=np.int64)
    for i in range(k):
        acc += table[i, rows[:, i]]
    return comb(n, k) - 1 - acc


def subset_ranks(mask: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Ranks of every k-subset of every row of a boolean (r, n) membership matrix.

    Returns ``(ranks, row_ids)``; rows with fewer than k members contribute nothing.
    """
    r, n = mask.shape
    sizes = mask.sum(axis=1)
    out_ranks = []
    out_rows = []
    for s in np.unique(sizes):
        s = int(s)
        if s < k:
            continue
        sel = np.flatnonzero(sizes == s)
        # members of each selected row, ascending, shape (len(sel), s)
        members = np.nonzero(mask[sel])[1].reshape(len(sel), s)
        combos = combo_index(s, k)
        tuples = members[:, combos].reshape(-1, k)
        out_ranks.append(rank_rows(tuples, n, k))
        out_rows.append(np.repeat(sel, len(combos)))
    if not out_ranks:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.intp)
    return np.concatenate(out_ranks), np.concatenate(out_rows)
