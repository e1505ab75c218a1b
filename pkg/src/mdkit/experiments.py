"""Run drivers: single experiments, convergence sweeps, regime comparisons.

These are the workhorses behind the CLI subcommands, but they are plain
functions so they can be scripted directly.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import md as md_mod
from . import sp as sp_mod
from . import wkb as wkb_mod
from .diagnostics import TimeSeries, error_norms, gauge_residual
from .dirac import nr_projector_split
from .dumps import dump_path, write_dump
from .fields import total_charge
from .presets import Preset, make_preset

log = logging.getLogger(__name__)


class NumericalAbort(RuntimeError):
    """Raised when a run halts on a caustic or non-finite data."""


@dataclass
class RunResult:
    preset: str
    solver: str
    series: TimeSeries
    final_state: Any
    aborted: Optional[str] = None  # None | "caustic" | "nan"
    dump_files: list[Path] = field(default_factory=list)


def _dump_schedule(
    dump_times: Sequence[float], dt: float, n_steps: int
) -> dict[int, float]:
    sched: dict[int, float] = {}
    for t in dump_times:
        step = int(round(t / dt))
        if not (0 <= step <= n_steps) or abs(step * dt - t) > 0.5 * dt:
            log.warning("dump time %g is not on the step grid; skipping", t)
            continue
        sched[step] = t
    return sched


def run_experiment(
    preset: Preset,
    solver: str | None = None,
    output_dir: Optional[Path] = None,
    dump_times: Sequence[float] = (),
    stride: int = 1,
) -> RunResult:
    """Advance one preset to t_final, recording diagnostics every `stride`
    steps and writing field dumps at the requested times.

    WKB runs halt early (aborted="caustic") when the phase curvature metric
    crosses the configured threshold; all solvers halt on non-finite data.
    """
    cfg = preset.cfg
    if solver is None:
        solver = preset.solver
    if output_dir is not None:
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
    sched = _dump_schedule(dump_times, cfg.dt, cfg.n_steps)

    if solver == "md":
        state: Any = preset.md_state()
        series = TimeSeries()
    elif solver == "wkb":
        state = preset.wkb_state()
        series = TimeSeries(extra_columns=("caustic_metric",))
    elif solver == "sp":
        state = preset.sp_state()
        series = TimeSeries()
    else:
        raise ValueError(f"unknown solver kind {solver!r}")

    result = RunResult(preset.name, solver, series, state)

    def record() -> float:
        if solver == "md":
            charge = total_charge(state.psi)
            kw: dict[str, float] = {
                "gauge_residual": gauge_residual(state.pot, cfg.delta)
            }
            if preset.reference is not None:
                psi_ref, _ = preset.reference(state.time)
                err = error_norms(state.psi, psi_ref)
                kw["l2_error"] = err["l2_rel"]
                kw["linf_error"] = err["linf_abs"]
        elif solver == "wkb":
            charge = wkb_mod.wkb_charge(state)
            kw = {"caustic_metric": state.caustic_metric}
        else:
            charge = sp_mod.sp_charge(state)
            kw = {}
        series.add(state.time, charge, **kw)
        return charge

    def dump(t: float) -> None:
        if output_dir is None:
            return
        eps, dlt = cfg.epsilon, cfg.delta
        grid = cfg.grid

        def put(name: str, data) -> None:
            # the file name carries the requested time so callers can find it;
            # the header records the actual state time (they differ only when
            # the request was snapped to the nearest step)
            path = dump_path(output_dir, name, t)
            write_dump(path, name, data, grid, state.time, eps, dlt)
            result.dump_files.append(path)

        if solver == "md":
            put("psi", state.psi.data)
            put("v", state.pot.v)
            put("a", state.pot.a)
        elif solver == "wkb":
            put("u_plus", state.u_p.data)
            put("u_minus", state.u_m.data)
            put("phi_plus", state.phi_p)
            put("phi_minus", state.phi_m)
            put("v", state.pot.v)
        else:
            put("phi_e", state.phi_e.data)
            put("phi_p", state.phi_p.data)
            put("v", state.v)

    record()
    if 0 in sched:
        dump(sched[0])

    for step in range(1, cfg.n_steps + 1):
        if solver == "md":
            state = md_mod.advance(state, cfg)
        elif solver == "wkb":
            state = wkb_mod.wkb_advance(state, cfg)
            if state.caustic_flag:
                result.aborted = "caustic"
                log.warning(
                    "caustic metric %.3g crossed threshold %.3g at t = %.6g; halting",
                    state.caustic_metric,
                    cfg.caustic_threshold,
                    state.time,
                )
                break
        else:
            state = sp_mod.sp_advance(state, cfg)

        charge = float("nan")
        if step % stride == 0 or step == cfg.n_steps:
            charge = record()
        if step in sched:
            dump(sched[step])
        if step % stride == 0 and not np.isfinite(charge):
            result.aborted = "nan"
            log.error("non-finite state at t = %.6g; halting", state.time)
            break

    result.final_state = state
    if output_dir is not None:
        series.write_csv(output_dir / "timeseries.csv")
    return result


# ---------------------------------------------------------------------------
# convergence sweeps (exact solution required)
# ---------------------------------------------------------------------------

_SWEEP_DEFAULTS = dict(t_final=0.25)
_SPACE_SWEEP_DT = 1.0 / 1024.0
_TIME_SWEEP_N = 32


def _sweep_level(axis: str, level: float, overrides: dict) -> dict[str, float]:
    kw = dict(_SWEEP_DEFAULTS)
    kw.update(overrides)
    if axis == "space":
        kw.setdefault("dt", _SPACE_SWEEP_DT)
        kw["n"] = int(level)
    elif axis == "time":
        kw.setdefault("n", _TIME_SWEEP_N)
        kw["dt"] = float(level)
    else:
        raise ValueError(f"axis must be 'space' or 'time', got {axis!r}")
    preset = make_preset("exact_plane_wave", **kw)
    cfg = preset.cfg
    state = preset.md_state()
    for _ in range(cfg.n_steps):
        state = md_mod.advance(state, cfg)
    psi_ref, _ = preset.reference(state.time)
    err = error_norms(state.psi, psi_ref)
    h = cfg.grid.dx[0] if axis == "space" else cfg.dt
    return {
        "level": float(level),
        "h": float(h),
        "l2_error": err["l2_rel"],
        "linf_error": err["linf_abs"],
    }


def convergence_sweep(
    axis: str,
    levels: Sequence[float],
    overrides: dict | None = None,
    parallel: bool = False,
) -> list[dict[str, float]]:
    """Error against the exact travelling wave at t_final for each level.

    axis="space": levels are grid sizes per axis, stepped at a dt small
    enough for the time error to sit below the spatial one.
    axis="time": levels are dt values on a fixed grid.
    Rows gain an "order" entry, log(e_prev/e_cur)/log(h_prev/h_cur).
    """
    overrides = dict(overrides or {})
    if parallel and len(levels) > 1:
        with ProcessPoolExecutor(max_workers=min(len(levels), 4)) as pool:
            rows = list(
                pool.map(_sweep_level, [axis] * len(levels), levels, [overrides] * len(levels))
            )
    else:
        rows = [_sweep_level(axis, lvl, overrides) for lvl in levels]
    for prev, cur in zip(rows, rows[1:]):
        ratio_h = prev["h"] / cur["h"]
        if prev["l2_error"] > 0 and cur["l2_error"] > 0 and ratio_h != 1.0:
            cur["order"] = float(
                np.log(prev["l2_error"] / cur["l2_error"]) / np.log(ratio_h)
            )
        else:
            cur["order"] = float("nan")
    rows[0]["order"] = float("nan")
    return rows


# ---------------------------------------------------------------------------
# regime comparisons
# ---------------------------------------------------------------------------


def _compare_level(pair: str, value: float, overrides: dict) -> dict[str, float]:
    if pair == "md_vs_wkb":
        kw = dict(preset="steady_state", **overrides)
        name = kw.pop("preset")
        preset = make_preset(name, epsilon=float(value), **kw)
        cfg = preset.cfg
        md_state = preset.md_state()
        wkb_state = preset.wkb_state()
        sup_l2 = sup_linf = 0.0
        for _ in range(cfg.n_steps):
            md_state = md_mod.advance(md_state, cfg)
            wkb_state = wkb_mod.wkb_advance(wkb_state, cfg)
            if wkb_state.caustic_flag:
                break
            err = error_norms(
                md_state.psi, wkb_mod.wkb_reconstruct(wkb_state, cfg.epsilon)
            )
            sup_l2 = max(sup_l2, err["l2_rel"])
            sup_linf = max(sup_linf, err["linf_abs"])
        return {"value": float(value), "l2_error": sup_l2, "linf_error": sup_linf}

    if pair == "md_vs_sp":
        kw = dict(preset="nr_gaussian", **overrides)
        name = kw.pop("preset")
        preset = make_preset(name, delta=float(value), **kw)
        cfg = preset.cfg
        md_state = preset.md_state()
        sp_state = preset.sp_state()
        sup_sq = 0.0
        for _ in range(cfg.n_steps):
            md_state = md_mod.advance(md_state, cfg)
            sp_state = sp_mod.sp_advance(sp_state, cfg)
            psi_e, psi_p = nr_projector_split(
                md_state.psi, cfg.delta, t=md_state.time
            )
            diff_sq = np.sum(np.abs(psi_e.data - sp_state.phi_e.data) ** 2, axis=0)
            diff_sq += np.sum(np.abs(psi_p.data - sp_state.phi_p.data) ** 2, axis=0)
            sup_sq = max(sup_sq, float(diff_sq.max()))
        return {"value": float(value), "branch_error_sq": sup_sq}

    raise ValueError(f"pair must be 'md_vs_wkb' or 'md_vs_sp', got {pair!r}")


def compare_regimes(
    pair: str,
    values: Sequence[float],
    overrides: dict | None = None,
    parallel: bool = False,
) -> list[dict[str, float]]:
    """Sup-in-time deviation between the full solver and a limit model.

    md_vs_wkb sweeps epsilon on a semi-classical preset and compares the
    spinor with the reconstructed WKB field (relative l2 and absolute sup).
    md_vs_sp sweeps delta on a non-relativistic preset and compares the
    phase-corrected energy branches with the Schroedinger-Poisson
    envelopes (grid max of the summed squared moduli).
    """
    overrides = dict(overrides or {})
    if parallel and len(values) > 1:
        with ProcessPoolExecutor(max_workers=min(len(values), 4)) as pool:
            rows = list(
                pool.map(
                    _compare_level, [pair] * len(values), values, [overrides] * len(values)
                )
            )
    else:
        rows = [_compare_level(pair, v, overrides) for v in values]
    return rows
