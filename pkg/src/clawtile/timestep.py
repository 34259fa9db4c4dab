"""CFL-adaptive time stepping with revert-and-retry.

A step sweeps every axis in fixed order (x, then y, then z) using one
shared dt, ping-ponging between preallocated buffers.  Ghost cells are
refilled before every directional sweep so each sweep sees boundary data
consistent with the buffer it reads; with periodic boundaries this is
what keeps the step loop conservative to rounding instead of leaking
through stale intermediate-state ghosts.  The step size is chosen from
the previous step's observed maximum wave speed; after the sweeps, the
realized CFL number is checked against the hard limit and the step is
either accepted (buffers rotate) or reverted (the start-of-step buffer's
interior was never written, so retrying is exact).
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import perf
from .boundary import BoundarySpec, apply_boundary
from .errors import NumericalBlowup, UnstableStepError
from .grid import StateGrid
from .limiter import LimiterKind
from .riemann import RiemannSolver
from .sweep import TilePlan, plan_tiles, sweep_axis_tiled

log = logging.getLogger("clawtile.timestep")


def step_order(ndim: int) -> tuple[int, ...]:
    """Axis sweep order for one step: x, then y, then z.

    Each sweep consumes the previous sweep's output.
    """
    if ndim not in (1, 2, 3):
        raise ValueError(f"ndim must be 1, 2 or 3, got {ndim}")
    return tuple(range(ndim))


@dataclass(frozen=True)
class StepAttempt:
    """Record of one attempted step, accepted or not."""

    t_start: float
    dt: float
    max_speed: float
    nu: float
    accepted: bool
    landed: bool  # dt was clipped to land exactly on a stop time
    dt_retry: float | None = None  # suggested dt after a revert, else None


@dataclass
class RunReport:
    steps_accepted: int = 0
    steps_reverted: int = 0
    t_final: float = 0.0
    nu_max: float = 0.0
    attempts: list[StepAttempt] = field(default_factory=list)


class Simulation:
    """Owns the evolving state and advances it in time.

    The current solution lives in ``grid``; two scratch buffers of the
    same shape hold sweep outputs.  Reverted attempts never touch the
    current buffer's interior, which is what makes retries bitwise exact.
    """

    def __init__(
        self,
        grid: StateGrid,
        solver: RiemannSolver,
        params: object,
        boundary: BoundarySpec,
        *,
        limiter: LimiterKind = LimiterKind.MC,
        cfl_target: float = 0.9,
        cfl_max: float = 1.0,
        dt_cap: float = math.inf,
        tile_shape: tuple[int, ...] | None = None,
        workers: int = 1,
        initial_max_speed: float | None = None,
        collect_counters: bool = False,
    ):
        if not 0.0 < cfl_target <= cfl_max <= 1.0:
            raise ValueError("need 0 < cfl_target <= cfl_max <= 1")
        if dt_cap <= 0.0:
            raise ValueError("dt_cap must be positive")
        if workers < 1:
            raise ValueError("workers must be at least 1")
        self.grid = grid
        self.solver = solver
        self.params = params
        self.boundary = boundary
        self.limiter = limiter
        self.cfl_target = float(cfl_target)
        self.cfl_max = float(cfl_max)
        self.dt_cap = float(dt_cap)
        self.workers = int(workers)
        self.collect_counters = collect_counters
        spec = grid.spec
        self.step_order = step_order(spec.ndim)
        shape = tuple(tile_shape) if tile_shape is not None else spec.cells
        self.plans: tuple[TilePlan, ...] = tuple(
            plan_tiles(spec, axis, shape) for axis in self.step_order
        )
        self._scratch = [StateGrid(spec, grid.dtype) for _ in range(2)]
        self._min_spacing = min(spec.spacing)
        self.t = 0.0
        self.steps_accepted = 0
        self.steps_reverted = 0
        self.nu_max = 0.0
        self.counters = perf.RunCounters()
        self._prev_reverted = False
        self._prev_nu = math.inf
        self._executor: ThreadPoolExecutor | None = None
        if initial_max_speed is None:
            initial_max_speed = 0.0
        self.last_max_speed = float(initial_max_speed)

    # -- lifecycle ---------------------------------------------------------

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def __enter__(self) -> "Simulation":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _pool(self) -> ThreadPoolExecutor | None:
        if self.workers <= 1:
            return None
        if all(p.num_tiles == 1 for p in self.plans):
            return None
        if self._executor is None:
            self._executor = ThreadPoolExecutor(max_workers=self.workers)
        return self._executor

    # -- stepping ----------------------------------------------------------

    def estimate_dt(self, stop: float | None = None) -> tuple[float, bool]:
        """Step size from the previous step's max speed, clipped to land
        exactly on ``stop`` when it would otherwise overshoot.

        With no wave activity recorded yet (speed 0) the configured cap
        applies; landing on a stop still works because the clip runs after.
        """
        s = self.last_max_speed
        if s > 0.0:
            dt = self.cfl_target * self._min_spacing / s
            dt = min(dt, self.dt_cap)
        else:
            dt = self.dt_cap
            log.debug("no wave speed on record; using dt cap %g", dt)
        landed = False
        if stop is not None:
            remaining = stop - self.t
            if remaining <= 0.0:
                raise ValueError(f"stop time {stop} is not ahead of t={self.t}")
            if dt >= remaining:
                dt = remaining
                landed = True
        if not math.isfinite(dt):
            raise ValueError(
                "cannot size a step: no wave activity, no dt cap, no stop time"
            )
        return dt, landed

    def _check_finite(self, out: StateGrid) -> None:
        interior = out.interior()
        if np.all(np.isfinite(interior)):
            return
        bad = np.argwhere(~np.isfinite(interior))[0]
        state = int(bad[0])
        cell = tuple(int(c) for c in reversed(bad[1:]))
        raise NumericalBlowup(state, cell, self.steps_accepted)

    def attempt_step(self, stop: float | None = None) -> StepAttempt:
        """Run one full step attempt; accept or revert by the CFL check.

        Each sweep gets a fresh boundary fill of the buffer it reads, so
        intermediate states carry boundary data consistent with their own
        interior rather than the step-start field.
        """
        dt, landed = self.estimate_dt(stop)
        t_start = self.t
        pool = self._pool()
        src = self.grid
        step_speed = 0.0
        for j, axis in enumerate(self.step_order):
            apply_boundary(src, self.boundary)
            dst = self._scratch[j % 2]
            result = sweep_axis_tiled(
                src, dst, axis, dt, self.solver, self.limiter, self.params,
                self.plans[axis], workers=self.workers, executor=pool,
            )
            self._check_finite(dst)
            step_speed = max(step_speed, result.max_abs_speed)
            if self.collect_counters:
                self.counters.add_sweep(axis, result.counters, result.stage_flops)
            src = dst
        nu = dt * step_speed / self._min_spacing
        accepted = nu <= self.cfl_max
        dt_retry = None
        if accepted:
            final = src
            last = (len(self.step_order) - 1) % 2
            self._scratch = [self.grid, self._scratch[1 - last]]
            self.grid = final
            self.t = stop if (landed and stop is not None) else t_start + dt
            self.steps_accepted += 1
            self.nu_max = max(self.nu_max, nu)
            self._prev_reverted = False
        else:
            self.steps_reverted += 1
            dt_retry = self.cfl_target * self._min_spacing / step_speed
            log.info(
                "step reverted at t=%.9g: nu=%.6f exceeds %.3f; retrying with "
                "dt=%.6g from measured speed %.6g",
                t_start, nu, self.cfl_max, dt_retry, step_speed,
            )
            if self._prev_reverted and nu >= self._prev_nu:
                raise UnstableStepError(
                    f"two consecutive reverted steps without improvement "
                    f"(nu {self._prev_nu:.6f} -> {nu:.6f} at t={t_start:.9g})"
                )
            self._prev_reverted = True
            self._prev_nu = nu
        self.last_max_speed = step_speed
        return StepAttempt(
            t_start=t_start, dt=dt, max_speed=step_speed, nu=nu,
            accepted=accepted, landed=landed and accepted, dt_retry=dt_retry,
        )

    def run_until(
        self,
        t_end: float,
        frame_times: tuple[float, ...] = (),
        on_frame=None,
        max_steps: int | None = None,
    ) -> RunReport:
        """Advance to ``t_end``, landing exactly on each frame time.

        ``on_frame(sim)`` fires after the step that reaches a frame time.
        ``max_steps`` bounds accepted steps (reverts not counted), useful
        for fixed-step comparisons.
        """
        if t_end < self.t:
            raise ValueError(f"t_end {t_end} is behind current t {self.t}")
        frames = sorted(frame_times)
        for ft in frames:
            if ft <= self.t or ft > t_end:
                raise ValueError(
                    f"frame time {ft} outside the run window ({self.t}, {t_end}]"
                )
        report = RunReport(t_final=self.t)
        fi = 0
        start_accepted = self.steps_accepted
        while self.t < t_end:
            if max_steps is not None and self.steps_accepted - start_accepted >= max_steps:
                break
            stop = frames[fi] if fi < len(frames) else t_end
            attempt = self.attempt_step(stop=stop)
            report.attempts.append(attempt)
            if attempt.accepted:
                report.steps_accepted += 1
                report.nu_max = max(report.nu_max, attempt.nu)
                while fi < len(frames) and self.t >= frames[fi]:
                    if on_frame is not None:
                        on_frame(self)
                    fi += 1
            else:
                report.steps_reverted += 1
        report.t_final = self.t
        return report
