"""Time loop driver: snapshots, per-step logs, report, abort handling."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import backends, diagnostics, sph_core
from .config import SimConfig
from .constitutive import pressure
from .neighbors import build_neighbors
from .scenarios import build_scenario
from .snapshots import SnapshotFrame, build_frame, write_snapshot
from .sph_core import NumericalAbort

__all__ = ["RunResult", "run"]


@dataclass
class RunResult:
    config: SimConfig
    status: str                    # "completed" | "aborted"
    final_time: float
    steps: int
    frames: list = field(default_factory=list)
    frame_paths: list = field(default_factory=list)
    step_log: dict = field(default_factory=dict)
    interior: np.ndarray = None
    system: object = None
    report_path: str = ""
    message: str = ""

    @property
    def final_frame(self) -> SnapshotFrame:
        return self.frames[-1]


def _frame_diagnostics(ps, table, interior, gravity, extra):
    stats = diagnostics.spacing_stats(ps.x, table, ps.real, interior, ps.spacing)
    mom = diagnostics.total_momentum(ps)
    out = {
        "max_spread": diagnostics.max_spread(ps),
        "momentum_x": mom[0],
        "momentum_y": mom[1],
        "spacing": stats.as_dict(),
    }
    out.update(diagnostics.energies(ps, gravity))
    out.update(extra)
    return out


def run(cfg: SimConfig, out_dir=None, keep_frames: bool = True,
        keep_system: bool = False, backend=None, progress=False) -> RunResult:
    """Execute one configured simulation.

    Writes numbered snapshots in the configured formats plus a JSON report
    with final diagnostics and the per-step momentum/energy log.  Numerical
    failure (non-finite fields, collapsed density or cell) ends the run with
    status "aborted" and a diagnostic dump frame instead of raising.
    """
    cfg.validate()
    backend = backend or backends.get_backend()
    out_dir = cfg.out_dir if out_dir is None else out_dir
    os.makedirs(out_dir, exist_ok=True)

    ps, wall = build_scenario(cfg)
    mat = cfg.material()
    controls = cfg.controls()
    mode = cfg.mode()
    h = cfg.smoothing_length
    b = cfg.kernel_b
    segs = wall.as_array()
    formats = cfg.snapshot_formats()

    table0 = build_neighbors(ps.x, b * h)
    interior = diagnostics.interior_ids(table0, ps.real)

    # initial knot assignment per the per-step flowchart (zero stress -> all
    # compression -> a = knot_compression everywhere in adaptive mode)
    if mode.kind == sph_core.MODE_ADAPTIVE:
        r_imm = sph_core.farthest_immediate_distance(
            ps.cell_dx, ps.cell_dy, ps.cell_shx, ps.cell_shy)
        a_new, zone = backend.adapt_knots(
            ps.x, pressure(ps.sigma), r_imm, table0.indptr, table0.indices,
            ps.kind, b, h, mode.eta_immediate, mode.knot_compression)
        ps.a_knot[ps.real] = a_new[ps.real]
        ps.zone_tension = zone

    log = {key: [] for key in (
        "t", "px", "py", "bnd_jx", "bnd_jy", "resid_x", "resid_y",
        "kinetic", "internal", "potential", "n_tension", "max_lambda")}
    frames, frame_paths = [], []

    def emit(time, table, extra):
        frame = build_frame(ps, time, _frame_diagnostics(
            ps, table, interior, controls.gravity, extra))
        if keep_frames:
            frames.append(frame)
        for fmt in formats:
            path = os.path.join(out_dir, f"frame_{len(frame_paths):04d}.{fmt}")
            write_snapshot(frame, path, fmt)
        frame_paths.append(os.path.join(out_dir, f"frame_{len(frame_paths):04d}"))
        return frame

    emit(0.0, table0, {"step": 0})

    dt = controls.dt
    n_steps = int(np.ceil(cfg.end_time / dt - 1e-9))
    next_snap = cfg.snapshot_interval
    status, message = "completed", ""
    t = 0.0
    step = 0
    bnd_j = np.zeros(2)
    try:
        for step in range(1, n_steps + 1):
            table = build_neighbors(ps.x, b * h)
            diag = sph_core.step_predictor_corrector(
                ps, mat, controls, mode, segs, h, b, backend, table=table)
            t = step * dt
            bnd_j += diag.bnd_impulse
            if step % max(cfg.log_every, 1) == 0 or step == n_steps:
                mom = diagnostics.total_momentum(ps)
                en = diagnostics.energies(ps, controls.gravity)
                log["t"].append(t)
                log["px"].append(mom[0])
                log["py"].append(mom[1])
                log["bnd_jx"].append(bnd_j[0])
                log["bnd_jy"].append(bnd_j[1])
                log["resid_x"].append(diag.residual_impulse[0])
                log["resid_y"].append(diag.residual_impulse[1])
                log["kinetic"].append(en["kinetic"])
                log["internal"].append(en["internal"])
                log["potential"].append(en["potential"])
                log["n_tension"].append(diag.n_tension)
                log["max_lambda"].append(diag.max_lambda)
            if t + 0.5 * dt >= next_snap or step == n_steps:
                emit(t, table, {"step": step})
                while next_snap <= t + 0.5 * dt:
                    next_snap += cfg.snapshot_interval
            if progress and step % 500 == 0:
                print(f"  t={t:.4f}/{cfg.end_time} ({step}/{n_steps})", flush=True)
    except NumericalAbort as exc:
        status, message = "aborted", str(exc)
        dump = build_frame(ps, t, {"abort": message, "step": step})
        for fmt in formats or ["csv"]:
            write_snapshot(dump, os.path.join(out_dir, f"abort_dump.{fmt}"), fmt)
        if keep_frames:
            frames.append(dump)

    log_arrays = {k: np.asarray(v) for k, v in log.items()}
    result = RunResult(
        config=cfg,
        status=status,
        final_time=t,
        steps=step,
        frames=frames,
        frame_paths=frame_paths,
        step_log=log_arrays,
        interior=interior,
        system=ps if keep_system else None,
        message=message,
    )
    result.report_path = _write_report(result, out_dir, backend)
    return result


def _write_report(result: RunResult, out_dir, backend) -> str:
    log = result.step_log
    resid = np.hypot(log["resid_x"], log["resid_y"]) if log["t"].size else np.zeros(0)
    report = {
        "status": result.status,
        "message": result.message,
        "backend": backends.backend_name(backend),
        "steps": result.steps,
        "final_time": result.final_time,
        "config": {k: getattr(result.config, k) for k in vars(result.config)},
        "final_diagnostics": result.frames[-1].diagnostics if result.frames else {},
        "momentum_residual_max_per_step": float(resid.max()) if resid.size else 0.0,
        "step_log": {k: v.tolist() for k, v in log.items()},
    }
    path = os.path.join(out_dir, "report.json")
    with open(path, "w") as fh:
        json.dump(report, fh, indent=1, sort_keys=True)
    return path
