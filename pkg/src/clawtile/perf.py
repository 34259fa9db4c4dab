"""Operation and traffic accounting for the sweep kernels.

Counters are modeled, not measured: every sweep performs a statically
known number of interface solves, corrections and cell updates, and the
arithmetic cost of each event is obtained by shadow-executing the actual
scalar routines on a counting float type.  Totals are therefore exact,
deterministic for a given configuration, and independent of tiling and
worker count.  Memory traffic is modeled at the tile level: a tile owning
``w`` cells along the sweep axis reads ``w + 4`` cells per pencil and
writes ``w``, so halo overlap shows up as extra read traffic.

Divisions and square roots are tallied separately from simple flops
(add, subtract, multiply, negate, abs, min/max); a fused multiply-add
would count as two.  Operational intensity is flops (simple + special)
per byte of modeled traffic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # only for annotations; sweep imports this module at runtime
    from .limiter import LimiterKind
    from .riemann import RiemannSolver
    from .sweep import TilePlan
    from .grid import GridSpec


@dataclass
class KernelCounters:
    """Accumulated operation and byte counts."""

    flops: int = 0
    special: int = 0
    bytes_read: int = 0
    bytes_written: int = 0

    @property
    def total_flops(self) -> int:
        return self.flops + self.special

    @property
    def total_bytes(self) -> int:
        return self.bytes_read + self.bytes_written

    def add(self, other: "KernelCounters") -> None:
        self.flops += other.flops
        self.special += other.special
        self.bytes_read += other.bytes_read
        self.bytes_written += other.bytes_written

    def scaled(self, n: int) -> "KernelCounters":
        return KernelCounters(
            self.flops * n, self.special * n,
            self.bytes_read * n, self.bytes_written * n,
        )


@dataclass(frozen=True)
class MachineModel:
    """Peak rates for roofline bounds: flops/s and bytes/s.

    ``special_function_peak`` (flops/s for divides and square roots) is
    optional; the plain roofline uses only the first two.
    """

    peak_flops: float
    peak_bandwidth: float
    special_function_peak: float | None = None

    def __post_init__(self):
        if self.peak_flops <= 0.0 or self.peak_bandwidth <= 0.0:
            raise ValueError("machine peaks must be positive")
        if self.special_function_peak is not None and self.special_function_peak <= 0.0:
            raise ValueError("special_function_peak must be positive")


def operational_intensity(counters: KernelCounters) -> float:
    """Flops per byte of modeled traffic; zero traffic is an error."""
    b = counters.total_bytes
    if b == 0:
        raise ValueError("operational intensity undefined for zero bytes")
    return counters.total_flops / b


def roofline_bound(oi: float, machine: MachineModel) -> float:
    """Attainable flops/s: compute-bound plateau or bandwidth diagonal."""
    if oi < 0.0:
        raise ValueError("operational intensity cannot be negative")
    return min(machine.peak_flops, oi * machine.peak_bandwidth)


# --------------------------------------------------------------------------
# Counting float: shadow-executes scalar routines to price one event.


class _Tally:
    __slots__ = ("adds", "muls", "divs", "sqrts", "negs", "abses", "minmaxes")

    def __init__(self):
        self.adds = self.muls = self.divs = self.sqrts = 0
        self.negs = self.abses = self.minmaxes = 0

    @property
    def flops(self) -> int:
        return self.adds + self.muls + self.negs + self.abses + self.minmaxes

    @property
    def special(self) -> int:
        return self.divs + self.sqrts


class _CF:
    """Float wrapper that tallies arithmetic into a shared ledger.

    Supports exactly the operations the kernels use.  ``np.sqrt`` and
    ``np.abs`` on object scalars dispatch to the ``sqrt``/``__abs__``
    methods, so the genuine solver routines run unmodified.
    """

    __slots__ = ("v", "t")

    def __init__(self, v: float, t: _Tally):
        self.v = float(v)
        self.t = t

    def _wrap(self, v: float) -> "_CF":
        return _CF(v, self.t)

    def _val(self, other) -> float:
        return other.v if isinstance(other, _CF) else float(other)

    def __add__(self, other):
        self.t.adds += 1
        return self._wrap(self.v + self._val(other))

    __radd__ = __add__

    def __sub__(self, other):
        self.t.adds += 1
        return self._wrap(self.v - self._val(other))

    def __rsub__(self, other):
        self.t.adds += 1
        return self._wrap(self._val(other) - self.v)

    def __mul__(self, other):
        self.t.muls += 1
        return self._wrap(self.v * self._val(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        self.t.divs += 1
        return self._wrap(self.v / self._val(other))

    def __rtruediv__(self, other):
        self.t.divs += 1
        return self._wrap(self._val(other) / self.v)

    def __neg__(self):
        self.t.negs += 1
        return self._wrap(-self.v)

    def __abs__(self):
        self.t.abses += 1
        return self._wrap(abs(self.v))

    def abs(self):
        return self.__abs__()

    def sqrt(self):
        self.t.sqrts += 1
        return self._wrap(math.sqrt(self.v))

    def __lt__(self, other):
        return self.v < self._val(other)

    def __le__(self, other):
        return self.v <= self._val(other)

    def __gt__(self, other):
        return self.v > self._val(other)

    def __ge__(self, other):
        return self.v >= self._val(other)

    def __float__(self):
        return self.v


def _cf_array(values, tally: _Tally) -> np.ndarray:
    out = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        out[i] = _CF(v, tally)
    return out


# Representative interface states: generic (all speeds nonzero, smooth
# enough that every limiter branch does real work).
_SAMPLE_STATES = {
    "acoustics": ([1.2, 0.3, -0.4, 0.2], [0.7, -0.1, 0.5, -0.3]),
    "shallow_water": ([1.5, 0.4, -0.3], [0.9, -0.2, 0.6]),
    "advection": ([1.3], [0.4]),
}
_SAMPLE_PARAMS = {
    "acoustics": None,  # filled lazily to avoid an import cycle
    "shallow_water": None,
    "advection": None,
}


def _sample_pair(solver: "RiemannSolver", m: int):
    if solver.name in _SAMPLE_STATES:
        ql, qr = _SAMPLE_STATES[solver.name]
        ql, qr = list(ql), list(qr)
        while len(ql) < m:
            ql.append(0.15)
            qr.append(-0.25)
        return ql[:m], qr[:m]
    rng = np.random.default_rng(1234)
    return list(0.5 + rng.random(m)), list(0.5 + rng.random(m))


def _sample_params(solver: "RiemannSolver"):
    from . import riemann

    if solver.name == "acoustics":
        return riemann.AcousticsParams(sound_speed=1.1, impedance=0.9)
    if solver.name == "shallow_water":
        return riemann.ShallowWaterParams(gravity=1.3)
    if solver.name == "advection":
        return riemann.AdvectionParams(speed=0.8)
    return getattr(solver, "sample_params", None)


@lru_cache(maxsize=None)
def _solve_cost(solver_name: str, m: int) -> tuple[int, int]:
    """(flops, special) of one interface solve, by shadow execution."""
    from .riemann import get_solver

    solver = get_solver(solver_name)
    t = _Tally()
    ql_v, qr_v = _sample_pair(solver, m)
    ql = _cf_array(ql_v, t)
    qr = _cf_array(qr_v, t)
    pvec = solver.pack_params(_sample_params(solver), np.float64)
    params = _cf_array([float(v) for v in pvec], t)
    W = np.empty((solver.num_waves, m), dtype=object)
    s = np.empty(solver.num_waves, dtype=object)
    normal = solver.normal_index(1 if m > 1 else 0)
    solver.scalar(ql, qr, normal, params, W, s)
    return t.flops, t.special


def _kernel_fan_cost(m: int, num_waves: int) -> tuple[int, int]:
    """Fluctuation accumulation per fan, mirroring the kernel loop."""
    t = _Tally()
    rng = np.random.default_rng(7)
    W = np.empty((num_waves, m), dtype=object)
    for p in range(num_waves):
        for k in range(m):
            W[p, k] = _CF(rng.standard_normal(), t)
    S = _cf_array(rng.standard_normal(num_waves) + 1.5, t)
    am = np.empty(m, dtype=object)
    ap = np.empty(m, dtype=object)
    zero = _CF(0.0, t)
    smax = zero
    for k in range(m):
        am[k] = zero
        ap[k] = zero
    for p in range(num_waves):
        sp = S[p]
        asp = abs(sp)
        if asp > smax:
            smax = asp
        if sp < 0.0:
            for k in range(m):
                am[k] = am[k] + sp * W[p, k]
        elif sp > 0.0:
            for k in range(m):
                ap[k] = ap[k] + sp * W[p, k]
    return t.flops, t.special


def _phi_cost_tally(theta: "_CF", kind_id: int, t: _Tally) -> "_CF":
    one = _CF(1.0, t)
    if kind_id == 1:
        v = theta if theta < 1.0 else one
        return v if v > 0.0 else _CF(0.0, t)
    if kind_id == 2:
        a = 2.0 * theta
        if a > 1.0:
            a = one
        b = theta if theta < 2.0 else _CF(2.0, t)
        v = a if a > b else b
        return v if v > 0.0 else _CF(0.0, t)
    if kind_id == 3:
        v = 0.5 * (1.0 + theta)
        if v > 2.0:
            v = _CF(2.0, t)
        tt = 2.0 * theta
        if tt < v:
            v = tt
        return v if v > 0.0 else _CF(0.0, t)
    if kind_id == 4:
        a = abs(theta)
        return (theta + a) / (1.0 + a)
    return one


def _correction_cost(m: int, num_waves: int, limiter_id: int) -> tuple[int, int]:
    """Limiting plus second-order flux for one interface, kernel-shaped."""
    t = _Tally()
    rng = np.random.default_rng(11)
    Wm = np.empty((num_waves, m), dtype=object)
    Wu = np.empty((num_waves, m), dtype=object)
    for p in range(num_waves):
        for k in range(m):
            Wm[p, k] = _CF(rng.standard_normal() + 0.1, t)
            Wu[p, k] = _CF(rng.standard_normal() + 0.1, t)
    S = _cf_array(rng.standard_normal(num_waves) + 1.5, t)
    dtdx = _CF(0.4, t)
    ft = np.empty(m, dtype=object)
    zero = _CF(0.0, t)
    for k in range(m):
        ft[k] = zero
    for p in range(num_waves):
        sp = S[p]
        wn = zero
        wu = zero
        for k in range(m):
            wk = Wm[p, k]
            wn = wn + wk * wk
            wu = wu + Wu[p, k] * wk
        if limiter_id == 0 or wn.v == 0.0:
            lim = _CF(1.0, t)
        else:
            lim = _phi_cost_tally(wu / wn, limiter_id, t)
        asp = abs(sp)
        coef = 0.5 * asp * (1.0 - dtdx * asp) * lim
        for k in range(m):
            ft[k] = ft[k] + coef * Wm[p, k]
    return t.flops, t.special


def _update_cost(m: int) -> tuple[int, int]:
    """Final cell write from fluctuations and correction fluxes."""
    t = _Tally()
    rng = np.random.default_rng(13)
    q = _cf_array(rng.standard_normal(m), t)
    ap = _cf_array(rng.standard_normal(m), t)
    am = _cf_array(rng.standard_normal(m), t)
    ftn = _cf_array(rng.standard_normal(m), t)
    ftp = _cf_array(rng.standard_normal(m), t)
    dtdx = _CF(0.4, t)
    out = np.empty(m, dtype=object)
    for k in range(m):
        out[k] = q[k] - dtdx * (ap[k] + am[k]) - dtdx * (ftn[k] - ftp[k])
    return t.flops, t.special


@dataclass(frozen=True)
class SweepEvents:
    """Structural event counts for one sweep over one tile plan."""

    fans: int
    corrections: int
    cells: int
    pencil_reads: int  # cells read, halo included
    cells_written: int


def sweep_events(plan: "TilePlan", spec: "GridSpec") -> SweepEvents:
    fans = corrections = cells = reads = writes = 0
    for tile in plan.tiles:
        w = tile.width(plan.axis)
        pencils = 1
        for axis, (lo, hi) in enumerate(tile.owned):
            if axis != plan.axis:
                pencils *= hi - lo
        fans += (w + 3) * pencils
        corrections += (w + 1) * pencils
        cells += w * pencils
        reads += (w + 4) * pencils
        writes += w * pencils
    return SweepEvents(fans, corrections, cells, reads, writes)


@lru_cache(maxsize=None)
def _stage_costs(solver_name: str, m: int, num_waves: int, limiter_id: int):
    solve = _solve_cost(solver_name, m)
    fan = _kernel_fan_cost(m, num_waves)
    corr = _correction_cost(m, num_waves, limiter_id)
    upd = _update_cost(m)
    return solve, fan, corr, upd


def sweep_counters(
    plan: "TilePlan",
    spec: "GridSpec",
    solver: "RiemannSolver",
    limiter: "LimiterKind",
    itemsize: int,
) -> tuple[KernelCounters, dict]:
    """Modeled counters for one sweep, plus a per-stage flop split.

    The "riemann" stage covers interface solves, fluctuation sums and cell
    updates: the first-order scheme.  The "second_order" stage adds wave
    limiting and correction fluxes.  Byte traffic belongs to the sweep as
    a whole, not to a stage.
    """
    from .limiter import LIMITER_IDS

    ev = sweep_events(plan, spec)
    m = spec.num_states
    solve, fan, corr, upd = _stage_costs(
        solver.name, m, solver.num_waves, LIMITER_IDS[limiter]
    )
    riemann_f = solve[0] * ev.fans + fan[0] * ev.fans + upd[0] * ev.cells
    riemann_s = solve[1] * ev.fans + fan[1] * ev.fans + upd[1] * ev.cells
    second_f = corr[0] * ev.corrections
    second_s = corr[1] * ev.corrections
    counters = KernelCounters(
        flops=riemann_f + second_f,
        special=riemann_s + second_s,
        bytes_read=ev.pencil_reads * m * itemsize,
        bytes_written=ev.cells_written * m * itemsize,
    )
    stages = {
        "riemann": (riemann_f, riemann_s),
        "second_order": (second_f, second_s),
    }
    return counters, stages


def halo_extra_read_bytes(plan: "TilePlan", spec: "GridSpec", itemsize: int) -> int:
    """Read traffic added by tiling relative to a single-tile sweep.

    Each cut along the sweep axis adds one 4-cell halo re-read per pencil,
    so the total is exact: 4 * (chunks_along_axis - 1) * transverse_cells
    * num_states * itemsize.
    """
    mono = plan_events_monolithic(spec, plan.axis)
    tiled = sweep_events(plan, spec)
    return (tiled.pencil_reads - mono.pencil_reads) * spec.num_states * itemsize


def plan_events_monolithic(spec: "GridSpec", axis: int) -> SweepEvents:
    from .sweep import plan_tiles

    return sweep_events(plan_tiles(spec, axis, spec.cells), spec)


# --------------------------------------------------------------------------
# Run-level aggregation and reporting


_AXIS_NAMES = ("x", "y", "z")


class RunCounters:
    """Per-axis accumulation of sweep counters across a run."""

    def __init__(self):
        self.per_axis: dict[int, dict] = {}
        self.sweeps = 0

    def add_sweep(self, axis: int, counters: KernelCounters, stage_flops: dict) -> None:
        slot = self.per_axis.setdefault(
            axis,
            {"counters": KernelCounters(), "stages": {}},
        )
        slot["counters"].add(counters)
        for name, (f, s) in stage_flops.items():
            f0, s0 = slot["stages"].get(name, (0, 0))
            slot["stages"][name] = (f0 + f, s0 + s)
        self.sweeps += 1

    def total(self) -> KernelCounters:
        out = KernelCounters()
        for slot in self.per_axis.values():
            out.add(slot["counters"])
        return out


@dataclass(frozen=True)
class PerfRow:
    scope: str  # axis name or "all"
    stage: str  # "riemann" or "full"
    flops: int
    special: int
    bytes: int
    oi: float
    bound: float | None


@dataclass(frozen=True)
class PerfReport:
    rows: tuple[PerfRow, ...]
    machine: MachineModel | None
    collected: bool = True

    def row(self, scope: str, stage: str) -> PerfRow:
        for r in self.rows:
            if r.scope == scope and r.stage == stage:
                return r
        raise KeyError(f"no row for {scope}/{stage}")


def build_report(
    counters: RunCounters,
    machine: MachineModel | None,
    collected: bool | None = None,
) -> PerfReport:
    """Summarize a run: per sweep axis and overall, at both stage depths.

    Each scope gets a "riemann" row (first-order work against full
    traffic) and a "full" row (all stages); the "all" scope is the
    byte-weighted aggregate of the axes.  A run executed without counters
    yields an empty report marked not collected.
    """
    if collected is None:
        collected = counters.sweeps > 0
    if not collected:
        return PerfReport(rows=(), machine=machine, collected=False)
    rows: list[PerfRow] = []

    def emit(scope: str, stages: dict, counters_: KernelCounters):
        rf, rs = stages.get("riemann", (0, 0))
        sf, ss = stages.get("second_order", (0, 0))
        b = counters_.total_bytes
        for stage, f, s in (("riemann", rf, rs), ("full", rf + sf, rs + ss)):
            oi = (f + s) / b if b else 0.0
            bound = roofline_bound(oi, machine) if machine is not None else None
            rows.append(PerfRow(scope, stage, f, s, b, oi, bound))

    agg_stages: dict[str, tuple[int, int]] = {}
    agg_counters = KernelCounters()
    for axis in sorted(counters.per_axis):
        slot = counters.per_axis[axis]
        emit(_AXIS_NAMES[axis], slot["stages"], slot["counters"])
        for name, (f, s) in slot["stages"].items():
            f0, s0 = agg_stages.get(name, (0, 0))
            agg_stages[name] = (f0 + f, s0 + s)
        agg_counters.add(slot["counters"])
    emit("all", agg_stages, agg_counters)
    return PerfReport(rows=tuple(rows), machine=machine)


def render_text(report: PerfReport) -> str:
    """Human-readable aligned table."""
    if not report.collected:
        return "not collected (run executed without operation counters)"
    header = ("scope", "stage", "flops", "special", "bytes", "flops/byte", "bound flop/s")
    body = []
    for r in report.rows:
        bound = f"{r.bound:.4g}" if r.bound is not None else "-"
        body.append(
            (r.scope, r.stage, str(r.flops), str(r.special), str(r.bytes),
             f"{r.oi:.4f}", bound)
        )
    widths = [max(len(row[i]) for row in [header] + body) for i in range(len(header))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    for row in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    if report.machine is None:
        lines.append("roofline bounds omitted: no machine model configured")
    return "\n".join(lines)


def render_delimited(report: PerfReport, sep: str = "\t") -> str:
    """Machine-readable flat table, one row per scope/stage."""
    if not report.collected:
        return "not collected\n"
    lines = [sep.join(("scope", "stage", "flops", "special", "bytes", "oi", "bound"))]
    for r in report.rows:
        bound = repr(r.bound) if r.bound is not None else ""
        lines.append(
            sep.join((r.scope, r.stage, str(r.flops), str(r.special),
                      str(r.bytes), repr(r.oi), bound))
        )
    return "\n".join(lines) + "\n"
