"""Run diagnostics: spread, nearest-neighbor spacing, momentum and energy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .particles import KIND_REAL, NeighborTable, ParticleSystem

__all__ = [
    "max_spread",
    "nearest_neighbor_dists",
    "interior_ids",
    "SpacingStats",
    "spacing_stats",
    "total_momentum",
    "energies",
]


def max_spread(ps: ParticleSystem) -> float:
    """Maximum x-extent of the real particles (0 for fewer than two)."""
    xs = ps.x[ps.real, 0]
    if xs.size < 2:
        return 0.0
    return float(xs.max() - xs.min())


def nearest_neighbor_dists(x, table: NeighborTable, real_mask) -> np.ndarray:
    """Per-particle nearest real-real neighbor distance; inf when isolated
    (farther than the table radius from every other real particle)."""
    n = x.shape[0]
    counts = np.diff(table.indptr)
    ii = np.repeat(np.arange(n, dtype=np.int64), counts)
    jj = table.indices
    keep = real_mask[ii] & real_mask[jj]
    ii, jj = ii[keep], jj[keep]
    dist = np.hypot(x[ii, 0] - x[jj, 0], x[ii, 1] - x[jj, 1])
    nn = np.full(n, np.inf)
    np.minimum.at(nn, ii, dist)
    return nn


def interior_ids(table: NeighborTable, real_mask) -> np.ndarray:
    """Real particles with a full influence domain at t = 0 (maximal count)."""
    counts = np.diff(table.indptr)
    real_counts = counts[real_mask]
    if real_counts.size == 0:
        return np.zeros(0, dtype=np.int64)
    full = real_counts.max()
    ids = np.nonzero(real_mask & (counts == full))[0]
    return ids.astype(np.int64)


@dataclass
class SpacingStats:
    """Nearest-neighbor distance statistics over the tracked interior set."""

    min: float
    max: float
    frac_gt_15s: float   # fraction with nn distance > 1.5 * initial spacing
    frac_gt_20s: float
    hist_counts: np.ndarray
    hist_edges: np.ndarray

    def as_dict(self) -> dict:
        return {
            "min": self.min,
            "max": self.max,
            "frac_gt_15s": self.frac_gt_15s,
            "frac_gt_20s": self.frac_gt_20s,
            "hist_counts": self.hist_counts.tolist(),
            "hist_edges": self.hist_edges.tolist(),
        }


def spacing_stats(x, table: NeighborTable, real_mask, ids, spacing: float,
                  bins: int = 20) -> SpacingStats:
    """Exact nearest-neighbor statistics for the particles in ``ids``.

    An interior particle with no real neighbor inside the table radius counts
    as separated (inf distance) in both threshold fractions; the histogram
    covers the finite values only.
    """
    nn = nearest_neighbor_dists(x, table, real_mask)[ids]
    finite = nn[np.isfinite(nn)]
    if nn.size == 0:
        return SpacingStats(0.0, 0.0, 0.0, 0.0, np.zeros(bins, int), np.linspace(0, 1, bins + 1))
    counts, edges = np.histogram(finite / spacing, bins=bins, range=(0.0, 4.0))
    return SpacingStats(
        min=float(finite.min()) if finite.size else np.inf,
        max=float(nn.max()),
        frac_gt_15s=float(np.mean(nn > 1.5 * spacing)),
        frac_gt_20s=float(np.mean(nn > 2.0 * spacing)),
        hist_counts=counts,
        hist_edges=edges * spacing,
    )


def total_momentum(ps: ParticleSystem) -> np.ndarray:
    m = ps.m[ps.real]
    return np.array([float(m @ ps.v[ps.real, 0]), float(m @ ps.v[ps.real, 1])])


def energies(ps: ParticleSystem, gravity) -> dict:
    """Kinetic, internal (integrated stress power), and gravitational energy."""
    real = ps.real
    m = ps.m[real]
    v2 = (ps.v[real] ** 2).sum(axis=1)
    g = np.asarray(gravity, dtype=float)
    return {
        "kinetic": float(0.5 * m @ v2),
        "internal": float(m @ ps.e[real]),
        "potential": float(-(m * (ps.x[real] @ g)).sum()),
    }
