"""Builders shared across test modules."""

import numpy as np

from clawtile.boundary import BoundaryKind, BoundarySpec
from clawtile.grid import GridSpec, StateGrid, create_grid
from clawtile.riemann import (
    AcousticsParams,
    AdvectionParams,
    ShallowWaterParams,
    get_solver,
)


def make_spec(cells, num_states, lower=None, upper=None):
    nd = len(cells)
    if lower is None:
        lower = (0.0,) * nd
    if upper is None:
        upper = (1.0,) * nd
    return GridSpec(cells=tuple(cells), lower=tuple(lower),
                    upper=tuple(upper), num_states=num_states)


def periodic(ndim, normal_velocity=None):
    if normal_velocity is None:
        normal_velocity = tuple(range(1, ndim + 1))
    return BoundarySpec.uniform(BoundaryKind.PERIODIC, normal_velocity)


def outflow(ndim, normal_velocity=None):
    if normal_velocity is None:
        normal_velocity = tuple(range(1, ndim + 1))
    return BoundarySpec.uniform(BoundaryKind.OUTFLOW, normal_velocity)


def reflective(ndim, normal_velocity=None):
    if normal_velocity is None:
        normal_velocity = tuple(range(1, ndim + 1))
    return BoundarySpec.uniform(BoundaryKind.REFLECTIVE, normal_velocity)


def acoustics_grid(cells, *, dtype=np.float64, seed=0, amplitude=0.1):
    """Smooth random acoustics field on the unit box, ghost cells zero."""
    spec = make_spec(cells, num_states=len(cells) + 1)
    grid = create_grid(spec, dtype)
    rng = np.random.default_rng(seed)
    interior = grid.interior()
    interior[...] = amplitude * rng.standard_normal(interior.shape)
    return grid, AcousticsParams(sound_speed=1.0, impedance=1.0)


def shallow_water_grid(cells, *, dtype=np.float64, seed=0, gravity=1.0):
    """Positive-depth random shallow water field, ghost cells at rest."""
    spec = make_spec(cells, num_states=3)
    grid = create_grid(spec, dtype)
    rng = np.random.default_rng(seed)
    grid.data[0] = 1.0  # keeps ghost depths wet for boundary-free sweeps
    interior = grid.interior()
    interior[0] = 1.0 + 0.3 * rng.random(interior.shape[1:])
    interior[1] = 0.2 * rng.standard_normal(interior.shape[1:])
    interior[2] = 0.2 * rng.standard_normal(interior.shape[1:])
    return grid, ShallowWaterParams(gravity=gravity)


def advection_grid(cells, *, dtype=np.float64, speed=1.0, seed=0):
    spec = make_spec(cells, num_states=1)
    grid = create_grid(spec, dtype)
    rng = np.random.default_rng(seed)
    interior = grid.interior()
    interior[...] = rng.standard_normal(interior.shape)
    return grid, AdvectionParams(speed=speed)


def interior_sums(grid: StateGrid) -> np.ndarray:
    """Per-state interior totals in float64, for conservation checks."""
    m = grid.num_states
    return np.array(
        [np.sum(grid.interior(s), dtype=np.float64) for s in range(m)]
    )


SOLVERS = {name: get_solver(name) for name in ("acoustics", "shallow_water", "advection")}
