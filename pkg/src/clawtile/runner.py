"""Shared driver layer: build simulations from configs and run them.

Both the command line and the HTTP service call into these functions, so
a run started either way takes exactly the same code path through the
solver.
"""

from __future__ import annotations

import os
import time as _time
from dataclasses import dataclass, field

import numpy as np

from . import frames as frames_io
from .config import RunConfig
from .errors import ConfigError
from .grid import DTYPES, GridSpec, StateGrid, create_grid, fill_initial
from .boundary import BoundarySpec
from .perf import PerfReport, build_report
from .timestep import Simulation


def build_simulation(cfg: RunConfig) -> Simulation:
    """Materialize a configured run: grid, initial data, solver, stepper."""
    problem = cfg.problem_def
    spec = GridSpec(
        cells=cfg.cells,
        lower=cfg.lower,
        upper=cfg.upper,
        num_states=problem.num_states,
    )
    grid = create_grid(spec, dtype=DTYPES[cfg.precision])
    profile = problem.initial_profile(cfg.initial_profile, cfg.initial_options, spec)
    fill_initial(grid, profile)
    params = problem.make_params(cfg.physics)
    boundary = BoundarySpec(
        sides=cfg.boundary_sides,
        normal_velocity=problem.normal_velocity,
    )
    return Simulation(
        grid,
        problem.solver,
        params,
        boundary,
        limiter=cfg.limiter,
        cfl_target=cfg.cfl_target,
        cfl_max=cfg.cfl_max,
        dt_cap=cfg.dt_cap,
        tile_shape=cfg.effective_tiles(),
        workers=cfg.effective_workers(),
        initial_max_speed=problem.speed_bound(grid, params),
        collect_counters=cfg.counters,
    )


@dataclass
class RunSummary:
    t_final: float
    steps_accepted: int
    steps_reverted: int
    nu_max: float
    wall_seconds: float
    frames: list[dict] = field(default_factory=list)


def run_to_frames(cfg: RunConfig, out_dir: str) -> RunSummary:
    """Run to t_end, writing numbered frames and a manifest into ``out_dir``.

    Frame 0 is always the initial state.  If no scheduled frame lands on
    t_end, the final state is appended as one extra frame.
    """
    os.makedirs(out_dir, exist_ok=True)
    wall0 = _time.perf_counter()
    written: list[dict] = []

    def emit(sim: Simulation) -> None:
        index = len(written)
        name = frames_io.frame_filename(index)
        frames_io.write_frame(
            os.path.join(out_dir, name), sim.grid, sim.t, sim.steps_accepted
        )
        frames_io.append_manifest(out_dir, index, sim.t, sim.steps_accepted)
        written.append({"index": index, "time": sim.t, "step": sim.steps_accepted})

    with build_simulation(cfg) as sim:
        emit(sim)
        times = cfg.frame_times()
        report = sim.run_until(cfg.t_end, frame_times=times, on_frame=emit)
        if not times or times[-1] != cfg.t_end:
            emit(sim)
    return RunSummary(
        t_final=report.t_final,
        steps_accepted=report.steps_accepted,
        steps_reverted=report.steps_reverted,
        nu_max=report.nu_max,
        wall_seconds=_time.perf_counter() - wall0,
        frames=written,
    )


def run_perf(cfg: RunConfig) -> tuple[PerfReport, RunSummary]:
    """Run with counters on and summarize modeled work and intensity."""
    if not cfg.counters:
        cfg = cfg.with_overrides(counters=True)
    wall0 = _time.perf_counter()
    with build_simulation(cfg) as sim:
        report = sim.run_until(cfg.t_end)
        perf_report = build_report(sim.counters, cfg.machine)
    summary = RunSummary(
        t_final=report.t_final,
        steps_accepted=report.steps_accepted,
        steps_reverted=report.steps_reverted,
        nu_max=report.nu_max,
        wall_seconds=_time.perf_counter() - wall0,
    )
    return perf_report, summary


def block_mean(arr: np.ndarray, factor: int) -> np.ndarray:
    """Average non-overlapping ``factor``-wide blocks along every axis."""
    if factor == 1:
        return arr
    shape = []
    for n in arr.shape:
        if n % factor:
            raise ValueError(f"axis of {n} cells not divisible by {factor}")
        shape.extend((n // factor, factor))
    out = arr.reshape(shape)
    for axis in range(arr.ndim):
        out = out.mean(axis=axis + 1)
    return out


@dataclass(frozen=True)
class ConvergenceLevel:
    cells: tuple[int, ...]
    error: float  # L1 distance of the first state field to the reference
    order: float | None  # observed order vs the previous level


@dataclass(frozen=True)
class ConvergenceResult:
    levels: tuple[ConvergenceLevel, ...]
    reference_cells: tuple[int, ...]


def run_convergence(cfg: RunConfig, num_levels: int) -> ConvergenceResult:
    """Self-convergence ladder: doubled resolutions against the finest.

    Every level runs the configured problem to t_end; solutions are
    restricted to the coarsest grid by block averaging and compared to the
    finest level's restriction in the L1 norm (first state field).  The
    observed order between successive levels is log2(E_coarse / E_fine).
    The finest level is the reference, so only coarser levels get errors;
    orders involving the level adjacent to the reference overstate the
    true rate and are reported for completeness, not for judgment.
    """
    if num_levels < 3:
        raise ConfigError("a convergence ladder needs at least 3 levels")
    base = cfg.cells
    solutions = []
    sizes = []
    for level in range(num_levels):
        f = 2**level
        cells = tuple(c * f for c in base)
        lcfg = cfg.with_overrides(cells=cells, num_frames=0)
        with build_simulation(lcfg) as sim:
            sim.run_until(lcfg.t_end)
            coarse = block_mean(np.asarray(sim.grid.interior(0), dtype=np.float64), f)
        solutions.append(coarse)
        sizes.append(cells)
    ref = solutions[-1]
    vol = 1.0
    spec_base = GridSpec(base, cfg.lower, cfg.upper, 1)
    for d in spec_base.spacing:
        vol *= d
    errors = [float(np.sum(np.abs(sol - ref)) * vol) for sol in solutions[:-1]]
    levels = []
    for i, err in enumerate(errors):
        order = None
        if i > 0 and err > 0.0 and errors[i - 1] > 0.0:
            order = float(np.log2(errors[i - 1] / err))
        levels.append(ConvergenceLevel(cells=sizes[i], error=err, order=order))
    return ConvergenceResult(levels=tuple(levels), reference_cells=sizes[-1])
