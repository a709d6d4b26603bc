"""No-slip rigid walls: fixed ghost-particle layers with fictitious velocities.

A wall is a polyline of straight segments.  Three ghost rows are laid behind
each segment at perpendicular depths (k - 1/2) * spacing, k = 1..3, with the
nodes lattice-aligned along the segment, so that when the wall surface sits
half a spacing outside the fluid lattice the ghost rows continue the fluid
grid exactly.  At interior polyline corners each segment's rows are extended
three spacings past the shared vertex and the overlap is de-duplicated.

Ghost particles never move.  When one enters the influence domain of a real
particle the pair uses the fictitious relative velocity chi * v_real with
chi = min(chi_max, 1 + d_ghost/d_real); this is what the continuity, strain
rate, viscosity, and energy sums see.  The wall reaction in the momentum sum
uses the real particle's own stress mirrored onto the ghost.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .particles import KIND_BOUNDARY, ParticleSystem

__all__ = [
    "BoundarySegment",
    "WallGeometry",
    "generate_layers",
    "wall_velocity_scale",
    "fictitious_velocity",
    "distance_to_segment",
]

LAYER_COUNT = 3


@dataclass(frozen=True)
class BoundarySegment:
    """One straight wall segment with its inward normal (pointing at the fluid)."""

    p0: tuple
    p1: tuple

    @property
    def tangent(self) -> np.ndarray:
        t = np.asarray(self.p1, float) - np.asarray(self.p0, float)
        norm = np.linalg.norm(t)
        if norm == 0.0:
            raise ValueError("degenerate wall segment (zero length)")
        return t / norm

    @property
    def length(self) -> float:
        return float(np.linalg.norm(np.asarray(self.p1, float) - np.asarray(self.p0, float)))


@dataclass
class WallGeometry:
    """Wall polyline plus the inward normal sign convention per segment."""

    segments: list
    normals: list  # unit normals pointing into the fluid domain

    def as_array(self) -> np.ndarray:
        """(n_seg, 4) array of segment endpoints for the compute kernels."""
        if not self.segments:
            return np.zeros((0, 4))
        return np.array([[*s.p0, *s.p1] for s in self.segments], dtype=float)


def distance_to_segment(points, seg: np.ndarray):
    """Perpendicular (clamped) distance from points (N, 2) to one segment [x0,y0,x1,y1]."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    p0 = seg[:2]
    d = seg[2:] - p0
    len2 = float(d @ d)
    rel = points - p0
    t = np.clip((rel @ d) / len2, 0.0, 1.0)
    closest = p0 + t[:, None] * d
    return np.linalg.norm(points - closest, axis=1)


def generate_layers(wall: WallGeometry, spacing: float, rho0: float,
                    extends=None) -> ParticleSystem:
    """Build the three ghost layers for a wall polyline.

    Nodes along each segment are lattice-aligned with spacing ``spacing``
    over the full segment length (floor(L/s) + 1 nodes per row); rows sit at
    depths (k - 1/2) * s behind the surface.  ``extends`` gives per-segment
    (start, end) node counts by which rows run past the segment ends, used to
    fill interior corners; the overlap there is de-duplicated.  Ghost mass
    and density equal the fluid-side initialization.
    """
    if extends is None:
        extends = [(0, 0)] * len(wall.segments)
    positions, seg_idx = [], []
    for si, (seg, normal, ext) in enumerate(zip(wall.segments, wall.normals, extends)):
        t_hat = seg.tangent
        n_hat = np.asarray(normal, dtype=float)
        length = seg.length
        n_nodes = int(np.floor(length / spacing + 1e-9)) + 1
        offsets = np.arange(-ext[0], n_nodes + ext[1]) * spacing
        for k in range(1, LAYER_COUNT + 1):
            depth = (k - 0.5) * spacing
            row = np.asarray(seg.p0, float) + offsets[:, None] * t_hat - depth * n_hat
            positions.append(row)
            seg_idx.append(np.full(len(row), si, dtype=np.int32))
    pos = np.vstack(positions)
    seg_idx = np.concatenate(seg_idx)

    # de-duplicate corner overlap by half-lattice position hash
    key = np.round(pos / (0.5 * spacing)).astype(np.int64)
    _, keep = np.unique(key[:, 0] * (1 << 32) + key[:, 1], return_index=True)
    keep.sort()
    pos, seg_idx = pos[keep], seg_idx[keep]

    seg_arr = wall.as_array()
    dist = np.empty(len(pos))
    for si in range(len(wall.segments)):
        mask = seg_idx == si
        dist[mask] = distance_to_segment(pos[mask], seg_arr[si])
    # a deduped corner ghost belongs to whichever segment is nearest
    for si in range(len(wall.segments)):
        alt = distance_to_segment(pos, seg_arr[si])
        closer = alt < dist - 1e-12
        seg_idx[closer] = si
        dist[closer] = alt[closer]

    n = len(pos)
    ps = ParticleSystem(
        x=pos,
        v=np.zeros((n, 2)),
        rho=np.full(n, rho0),
        m=np.full(n, rho0 * spacing * spacing),
        kind=np.full(n, KIND_BOUNDARY, dtype=np.uint8),
        spacing=spacing,
    )
    ps.wall_seg = seg_idx
    ps.wall_dist = dist
    return ps


def wall_velocity_scale(dist_real: float, dist_ghost: float, chi_max: float) -> float:
    """chi = min(chi_max, 1 + d_ghost/d_real); chi_max in the d_real -> 0 limit."""
    if dist_real <= 0.0:
        return chi_max
    return min(chi_max, 1.0 + dist_ghost / dist_real)


def fictitious_velocity(v_real, dist_real, dist_ghost, chi_max):
    """Relative velocity v_ij = chi * v_real used against a wall ghost."""
    chi = wall_velocity_scale(dist_real, dist_ghost, chi_max)
    return chi * np.asarray(v_real, dtype=float)
