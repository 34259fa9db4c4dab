"""Tile-parallel finite-volume framework for hyperbolic conservation laws.

The scheme is second-order wave propagation with dimensional splitting:
each step sweeps the grid axis by axis, solving a point-wise Riemann
problem at every interface, limiting the waves, and applying fluctuations
plus correction fluxes in a single fused pass.  Sweeps are decomposed
into halo-overlapped tiles that run on worker threads and reproduce the
serial results bit for bit.
"""

__version__ = "0.1.0"

from .boundary import BoundaryKind, BoundarySpec, apply_boundary
from .config import RunConfig, load_config, loads
from .errors import (
    ClawtileError,
    ConfigError,
    DryStateError,
    FrameFormatError,
    NumericalBlowup,
    TruncatedFrameError,
    UnstableStepError,
)
from .frames import (
    Frame,
    FrameHeader,
    frame_bytes,
    frame_filename,
    load_into,
    parse_frame,
    read_frame,
    read_manifest,
    write_frame,
)
from .grid import GHOST, GridSpec, StateGrid, create_grid, fill_initial, linear_index
from .limiter import LimiterKind, limit_wave, phi
from .perf import (
    KernelCounters,
    MachineModel,
    operational_intensity,
    roofline_bound,
)
from .problems import PROBLEMS, Problem, get_problem
from .riemann import (
    AcousticsParams,
    AdvectionParams,
    Fluctuations,
    RiemannSolver,
    ShallowWaterParams,
    WaveFan,
    acoustics_normal,
    advection_normal,
    fluctuations,
    get_solver,
    register_solver,
    shallow_water_normal,
)
from .runner import build_simulation, run_convergence, run_perf, run_to_frames
from .sweep import Tile, TilePlan, plan_tiles, sweep_axis, sweep_axis_tiled
from .timestep import RunReport, Simulation, StepAttempt, step_order

__all__ = [
    "__version__",
    "BoundaryKind", "BoundarySpec", "apply_boundary",
    "RunConfig", "load_config", "loads",
    "ClawtileError", "ConfigError", "DryStateError", "FrameFormatError",
    "NumericalBlowup", "TruncatedFrameError", "UnstableStepError",
    "Frame", "FrameHeader", "frame_bytes", "frame_filename", "load_into",
    "parse_frame", "read_frame", "read_manifest", "write_frame",
    "GHOST", "GridSpec", "StateGrid", "create_grid", "fill_initial", "linear_index",
    "LimiterKind", "limit_wave", "phi",
    "KernelCounters", "MachineModel", "operational_intensity", "roofline_bound",
    "PROBLEMS", "Problem", "get_problem",
    "AcousticsParams", "AdvectionParams", "Fluctuations", "RiemannSolver",
    "ShallowWaterParams", "WaveFan", "acoustics_normal", "advection_normal",
    "fluctuations", "get_solver", "register_solver", "shallow_water_normal",
    "build_simulation", "run_convergence", "run_perf", "run_to_frames",
    "Tile", "TilePlan", "plan_tiles", "sweep_axis", "sweep_axis_tiled",
    "RunReport", "Simulation", "StepAttempt", "step_order",
]
