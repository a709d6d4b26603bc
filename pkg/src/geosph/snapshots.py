"""Snapshot frames and their CSV / legacy-VTK serialization.

CSV files carry one particle per row with a header naming every field,
written with repr-exact floats (%.17g) so a parse round-trips bit-for-bit
and repeated runs of the same configuration produce identical bytes.  VTK
output is ASCII POLYDATA with the particles as vertices, the scalar fields
as POINT_DATA, velocity as VECTORS, and the full stress tensor as TENSORS.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import constitutive as cst
from .particles import ParticleSystem

__all__ = ["SnapshotFrame", "build_frame", "write_snapshot", "read_csv_snapshot"]

# per-particle CSV columns, in order; each maps to a frame array
COLUMNS = (
    "id", "kind", "x", "y", "vx", "vy", "rho", "m",
    "sigma_xx", "sigma_yy", "sigma_zz", "sigma_xy",
    "p", "sqrt_j2", "eps_bar_p", "a_knot", "zone_tension",
)


@dataclass
class SnapshotFrame:
    """Immutable per-step export view: particle fields plus run diagnostics."""

    time: float
    data: dict
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.data["x"])


def build_frame(ps: ParticleSystem, time: float, diagnostics: dict = None) -> SnapshotFrame:
    tau = cst.deviator(ps.sigma)
    data = {
        "id": np.arange(ps.n, dtype=np.int64),
        "kind": ps.kind.astype(np.int64),
        "x": ps.x[:, 0].copy(),
        "y": ps.x[:, 1].copy(),
        "vx": ps.v[:, 0].copy(),
        "vy": ps.v[:, 1].copy(),
        "rho": ps.rho.copy(),
        "m": ps.m.copy(),
        "sigma_xx": ps.sigma[:, 0].copy(),
        "sigma_yy": ps.sigma[:, 1].copy(),
        "sigma_zz": ps.sigma[:, 2].copy(),
        "sigma_xy": ps.sigma[:, 3].copy(),
        "p": cst.pressure(ps.sigma),
        "sqrt_j2": np.sqrt(cst.j2_invariant(tau)),
        "eps_bar_p": ps.eps_bar_p.copy(),
        "a_knot": ps.a_knot.copy(),
        "zone_tension": ps.zone_tension.astype(np.int64),
    }
    return SnapshotFrame(time=time, data=data, diagnostics=dict(diagnostics or {}))


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(frame: SnapshotFrame, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(COLUMNS) + "\n")
        cols = [frame.data[c] for c in COLUMNS]
        for row in range(frame.n):
            fh.write(",".join(_fmt(col[row]) for col in cols) + "\n")


def read_csv_snapshot(path) -> dict:
    """Parse a snapshot CSV back into named arrays (round-trip oracle)."""
    raw = np.genfromtxt(path, delimiter=",", names=True)
    raw = np.atleast_1d(raw)
    return {name: np.asarray(raw[name]) for name in raw.dtype.names} if raw.size else {
        name: np.zeros(0) for name in COLUMNS}


_VTK_SCALARS = ("rho", "p", "sqrt_j2", "eps_bar_p", "a_knot", "kind", "zone_tension")


def write_vtk(frame: SnapshotFrame, path):
    """Legacy ASCII POLYDATA with per-point scalars, velocity, and stress."""
    n = frame.n
    d = frame.data
    with open(path, "w", newline="\n") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write(f"particle snapshot t={_fmt(frame.time)}\n")
        fh.write("ASCII\nDATASET POLYDATA\n")
        fh.write(f"POINTS {n} double\n")
        for i in range(n):
            fh.write(f"{_fmt(d['x'][i])} {_fmt(d['y'][i])} 0\n")
        fh.write(f"VERTICES {n} {2 * n}\n")
        for i in range(n):
            fh.write(f"1 {i}\n")
        fh.write(f"POINT_DATA {n}\n")
        for name in _VTK_SCALARS:
            fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
            col = d[name]
            for i in range(n):
                fh.write(_fmt(col[i]) + "\n")
        fh.write("VECTORS velocity double\n")
        for i in range(n):
            fh.write(f"{_fmt(d['vx'][i])} {_fmt(d['vy'][i])} 0\n")
        fh.write("TENSORS stress double\n")
        for i in range(n):
            sxx, syy, szz = d["sigma_xx"][i], d["sigma_yy"][i], d["sigma_zz"][i]
            sxy = d["sigma_xy"][i]
            fh.write(f"{_fmt(sxx)} {_fmt(sxy)} 0\n")
            fh.write(f"{_fmt(sxy)} {_fmt(syy)} 0\n")
            fh.write(f"0 0 {_fmt(szz)}\n")


def write_snapshot(frame: SnapshotFrame, path, fmt: str = "csv"):
    """Write one frame; fmt is 'csv' or 'vtk'."""
    if fmt == "csv":
        write_csv(frame, path)
    elif fmt == "vtk":
        write_vtk(frame, path)
    else:
        raise ValueError(f"unknown snapshot format {fmt!r}")
