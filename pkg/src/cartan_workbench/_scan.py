"""Chunked pairwise scans over element arrays."""

from __future__ import annotations

from typing import Callable, Iterator

import numpy as np

PAIR_BUDGET = 1 << 21


def row_chunks(n_rows: int, n_cols: int, budget: int = PAIR_BUDGET) -> Iterator[slice]:
    step = max(1, budget // max(1, n_cols))
    for start in range(0, n_rows, step):
        yield slice(start, min(n_rows, start + step))


def first_bad_pair(
    X: np.ndarray,
    Y: np.ndarray,
    bad: Callable[[np.ndarray, np.ndarray], np.ndarray],
) -> tuple[int, int] | None:
    """First (i, j) in row-major order with bad(X[i], Y[j]) true."""
    for sl in row_chunks(len(X), len(Y)):
        mask = bad(X[sl, None, :], Y[None, :, :])
        hits = np.argwhere(mask)
        if len(hits):
            i, j = hits[0]
            return sl.start + int(i), int(j)
    return None


def count_bad_pairs(
    X: np.ndarray,
    Y: np.ndarray,
    bad: Callable[[np.ndarray, np.ndarray], np.ndarray],
) -> tuple[int, tuple[int, int] | None]:
    total = 0
    first = None
    for sl in row_chunks(len(X), len(Y)):
        mask = bad(X[sl, None, :], Y[None, :, :])
        n = int(mask.sum())
        if n and first is None:
            i, j = np.argwhere(mask)[0]
            first = (sl.start + int(i), int(j))
        total += n
    return total, first
