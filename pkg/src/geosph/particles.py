"""Particle storage (struct-of-arrays), neighbor table, and step controls."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

KIND_REAL = 0
KIND_BOUNDARY = 1

__all__ = ["KIND_REAL", "KIND_BOUNDARY", "ParticleSystem", "NeighborTable", "StepControls"]


class ParticleSystem:
    """All per-particle fields as contiguous float64/uint8 arrays.

    Boundary particles share the arrays but never have their position,
    density, or stress integrated.  The deformed-cell fields (cell_*) track
    the stretch and shear of each particle's initial grid cell for the
    farthest-immediate-neighbor estimate.
    """

    def __init__(self, x, v, rho, m, kind, spacing):
        n = len(x)
        self.x = np.ascontiguousarray(x, dtype=np.float64).reshape(n, 2)
        self.v = np.ascontiguousarray(v, dtype=np.float64).reshape(n, 2)
        self.rho = np.ascontiguousarray(rho, dtype=np.float64)
        self.m = np.ascontiguousarray(m, dtype=np.float64)
        self.kind = np.ascontiguousarray(kind, dtype=np.uint8)
        self.spacing = float(spacing)
        self.sigma = np.zeros((n, 4))
        self.e = np.zeros(n)
        self.eps_bar_p = np.zeros(n)
        self.a_knot = np.ones(n)
        self.zone_tension = np.zeros(n, dtype=np.uint8)
        self.cell_dx = np.full(n, self.spacing)
        self.cell_dy = np.full(n, self.spacing)
        self.cell_shx = np.zeros(n)
        self.cell_shy = np.zeros(n)
        # wall association of boundary particles: segment index (-1 for real)
        # and fixed perpendicular distance to the wall surface
        self.wall_seg = np.full(n, -1, dtype=np.int32)
        self.wall_dist = np.zeros(n)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def real(self) -> np.ndarray:
        return self.kind == KIND_REAL

    @property
    def n_real(self) -> int:
        return int(np.count_nonzero(self.real))

    @classmethod
    def merge(cls, real_sys: "ParticleSystem", bnd_sys: "ParticleSystem") -> "ParticleSystem":
        merged = cls(
            np.vstack([real_sys.x, bnd_sys.x]),
            np.vstack([real_sys.v, bnd_sys.v]),
            np.concatenate([real_sys.rho, bnd_sys.rho]),
            np.concatenate([real_sys.m, bnd_sys.m]),
            np.concatenate([real_sys.kind, bnd_sys.kind]),
            real_sys.spacing,
        )
        for name in ("sigma", "e", "eps_bar_p", "a_knot", "zone_tension",
                     "cell_dx", "cell_dy", "cell_shx", "cell_shy",
                     "wall_seg", "wall_dist"):
            setattr(merged, name, np.concatenate([getattr(real_sys, name), getattr(bnd_sys, name)]))
        return merged

    def copy(self) -> "ParticleSystem":
        dup = ParticleSystem(self.x, self.v, self.rho, self.m, self.kind, self.spacing)
        for name in ("sigma", "e", "eps_bar_p", "a_knot", "zone_tension",
                     "cell_dx", "cell_dy", "cell_shx", "cell_shy",
                     "wall_seg", "wall_dist"):
            setattr(dup, name, getattr(self, name).copy())
        return dup


@dataclass
class NeighborTable:
    """Fixed-radius neighbor lists in CSR form (strict |x_i - x_j| < radius).

    Rows are sorted by neighbor index, self is excluded, and the relation is
    symmetric by construction.  The lists are rebuilt once per full time step;
    rate evaluations at the predicted half step reuse the index lists and
    recompute separations from the current positions.
    """

    indptr: np.ndarray
    indices: np.ndarray
    radius: float

    @property
    def counts(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors_of(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]


@dataclass
class StepControls:
    """Time step, artificial viscosity coefficients, gravity, wall velocity cap."""

    dt: float
    gamma1: float = 1.0
    gamma2: float = 0.0
    eps_visc: float = 0.01
    gravity: tuple = (0.0, -9.81)
    cfl_number: float = 0.1
    chi_max: float = 1.5

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.gamma1 < 0.0 or self.gamma2 < 0.0:
            raise ValueError("artificial viscosity coefficients must be non-negative")
        if self.chi_max < 1.0:
            raise ValueError(f"chi_max must be at least 1, got {self.chi_max}")
