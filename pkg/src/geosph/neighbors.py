"""Exact fixed-radius neighbor search on a uniform cell list.

Cells have side equal to the search radius, so candidates live in the 3x3
cell block around each particle.  Candidate gathering is vectorized over the
nine cell offsets via a sorted cell-key array (no dense grid is allocated, so
far-flung particles cannot blow up memory); the final distance filter is
strict (|x_i - x_j| < radius).  Pair order, and therefore every downstream
reduction order, is deterministic: rows sorted by particle index, neighbors
sorted within each row.
"""

from __future__ import annotations

import numpy as np

from .particles import NeighborTable

__all__ = ["build_neighbors"]


def build_neighbors(pos: np.ndarray, radius: float) -> NeighborTable:
    """Neighbor lists for all particles within strict ``radius``."""
    if radius <= 0.0:
        raise ValueError(f"search radius must be positive, got {radius}")
    pos = np.ascontiguousarray(pos, dtype=np.float64)
    n = pos.shape[0]
    if n == 0:
        return NeighborTable(np.zeros(1, dtype=np.int64), np.zeros(0, dtype=np.int64), radius)

    cx = np.floor(pos[:, 0] / radius).astype(np.int64)
    cy = np.floor(pos[:, 1] / radius).astype(np.int64)
    cx -= cx.min()
    cy -= cy.min()
    ncy = int(cy.max()) + 2  # +2 so key arithmetic for the +1 offset stays collision-free
    key = cx * ncy + cy
    order = np.argsort(key, kind="stable")
    key_sorted = key[order]

    ii_parts, jj_parts = [], []
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            probe = key + dx * ncy + dy
            left = np.searchsorted(key_sorted, probe, side="left")
            right = np.searchsorted(key_sorted, probe, side="right")
            counts = right - left
            total = int(counts.sum())
            if total == 0:
                continue
            ii = np.repeat(np.arange(n, dtype=np.int64), counts)
            starts = np.repeat(left, counts)
            offs = np.arange(total, dtype=np.int64) - np.repeat(
                np.cumsum(counts) - counts, counts
            )
            jj_parts.append(order[starts + offs])
            ii_parts.append(ii)

    ii = np.concatenate(ii_parts)
    jj = np.concatenate(jj_parts)
    d2 = ((pos[ii] - pos[jj]) ** 2).sum(axis=1)
    keep = (d2 < radius * radius) & (ii != jj)
    ii, jj = ii[keep], jj[keep]

    sort = np.lexsort((jj, ii))
    ii, jj = ii[sort], jj[sort]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(ii, minlength=n), out=indptr[1:])
    return NeighborTable(indptr, jj, radius)
