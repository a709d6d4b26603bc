"""Initial states for the built-in scenarios.

Both scenarios start stress-free with gravity switched on from t = 0; walls
are three-layer ghost lattices (see boundary).  Wall surfaces sit half a
spacing outside the fluid lattice so the ghost rows continue the grid.

cylinder_drop   disc of soil falling onto a rigid floor.  The disc is grid
                sampled: lattice points within r + drop_pad*s of the center
                (the pad reproduces the reference discretization of 8037
                particles at s = 0.5 mm for the 5 cm disc).
vertical_cut    rectangular soil block on a rigid floor, rigid wall on the
                left, free face on the right.  The nominal 4.0 x 2.0 m block
                at s = 0.025 m gives 161 x 81 = 13041 particles; the block
                dimensions are inferred from that count, not from a drawing.
custom          vertical_cut geometry with every dimension configurable.
"""

from __future__ import annotations

import numpy as np

from .boundary import BoundarySegment, WallGeometry, generate_layers
from .config import SimConfig
from .particles import KIND_REAL, ParticleSystem

__all__ = ["build_scenario", "build_cylinder_drop", "build_vertical_cut"]


def _real_system(pos, v0, cfg: SimConfig) -> ParticleSystem:
    n = len(pos)
    ps = ParticleSystem(
        x=pos,
        v=np.tile(np.asarray(v0, dtype=float), (n, 1)),
        rho=np.full(n, cfg.rho0),
        m=np.full(n, cfg.rho0 * cfg.spacing**2),
        kind=np.zeros(n, dtype=np.uint8),
        spacing=cfg.spacing,
    )
    return ps


def build_cylinder_drop(cfg: SimConfig):
    """Disc at impact speed above a rigid floor (surface at y = 0)."""
    s = cfg.spacing
    r = 0.5 * cfg.drop_diameter
    half = int(np.floor(r / s)) + 2
    ix = np.arange(-half, half + 1)
    gx, gy = np.meshgrid(ix * s, ix * s)
    keep = np.hypot(gx, gy) <= r + cfg.drop_pad * s
    center_y = cfg.drop_gap + r
    pos = np.column_stack([gx[keep], gy[keep] + center_y])
    real = _real_system(pos, (0.0, -cfg.drop_speed), cfg)

    half_floor = np.round(0.5 * cfg.floor_length / s) * s
    wall = WallGeometry(
        segments=[BoundarySegment((-half_floor, 0.0), (half_floor, 0.0))],
        normals=[(0.0, 1.0)],
    )
    bnd = generate_layers(wall, s, cfg.rho0)
    return ParticleSystem.merge(real, bnd), wall


def build_vertical_cut(cfg: SimConfig):
    """Soil block [0, W] x [0, H] with floor and (optionally) a left wall.

    Wall surfaces sit at y = -s/2 and x = -s/2; the floor runs to
    cfg.floor_extent to carry the post-failure run-out.
    """
    s = cfg.spacing
    nx = int(round(cfg.block_width / s)) + 1
    ny = int(round(cfg.block_height / s)) + 1
    gx, gy = np.meshgrid(np.arange(nx) * s, np.arange(ny) * s)
    pos = np.column_stack([gx.ravel(), gy.ravel()])
    real = _real_system(pos, (0.0, 0.0), cfg)

    floor_end = np.round(cfg.floor_extent / s) * s
    top = (round(cfg.block_height / s) + 3) * s
    segments = [BoundarySegment((0.0, -0.5 * s), (floor_end, -0.5 * s))]
    normals = [(0.0, 1.0)]
    extends = [(3, 0)] if cfg.left_wall else [(0, 0)]
    if cfg.left_wall:
        segments.append(BoundarySegment((-0.5 * s, 0.0), (-0.5 * s, top)))
        normals.append((1.0, 0.0))
        extends.append((3, 0))
    wall = WallGeometry(segments=segments, normals=normals)
    bnd = generate_layers(wall, s, cfg.rho0, extends=extends)
    return ParticleSystem.merge(real, bnd), wall


def build_scenario(cfg: SimConfig):
    """Dispatch on cfg.scenario; returns (ParticleSystem, WallGeometry)."""
    if cfg.scenario == "cylinder_drop":
        return build_cylinder_drop(cfg)
    if cfg.scenario in ("vertical_cut", "custom"):
        return build_vertical_cut(cfg)
    raise ValueError(f"unknown scenario {cfg.scenario!r}")
