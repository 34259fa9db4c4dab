"""Built-in problem definitions: solver binding, physics parameters,
initial profiles, and the wave-speed bound used to size the first step.

A problem ties together everything the driver needs that is specific to
one equation system.  Initial profiles are referenced by name from run
configs and evaluated at cell centers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, DryStateError
from .grid import GridSpec, StateGrid
from .riemann import (
    AcousticsParams,
    AdvectionParams,
    ShallowWaterParams,
    RiemannSolver,
    get_solver,
)


def _take(options: dict, spec: GridSpec, allowed: dict) -> dict:
    """Resolve profile options against defaults; unknown keys are errors.

    Defaults may be callables of the grid spec so they can adapt to the
    domain (centers, extents).
    """
    out = {}
    for key, default in allowed.items():
        if key in options:
            out[key] = options[key]
        else:
            out[key] = default(spec) if callable(default) else default
    for key in options:
        if key not in allowed:
            raise ConfigError(
                f"unknown initial-profile option {key!r}; "
                f"expected one of: {', '.join(sorted(allowed))}"
            )
    return out


def _domain_center(spec: GridSpec) -> tuple[float, ...]:
    return tuple(0.5 * (l + u) for l, u in zip(spec.lower, spec.upper))


def _extent(spec: GridSpec, axis: int) -> float:
    return spec.upper[axis] - spec.lower[axis]


@dataclass(frozen=True)
class Problem:
    """One equation system with its solver and named initial profiles."""

    name: str
    ndim: int
    num_states: int
    solver_name: str
    field_names: tuple[str, ...]
    normal_velocity: tuple[int | None, ...]
    physics_keys: dict  # key -> default
    profiles: dict  # name -> builder(spec, options) -> profile callable

    @property
    def solver(self) -> RiemannSolver:
        return get_solver(self.solver_name)

    def make_params(self, physics: dict):
        for key in physics:
            if key not in self.physics_keys:
                raise ConfigError(
                    f"unknown physics key {key!r} for problem {self.name!r}; "
                    f"expected one of: {', '.join(sorted(self.physics_keys))}"
                )
        vals = dict(self.physics_keys)
        vals.update(physics)
        try:
            return _PARAM_BUILDERS[self.solver_name](vals)
        except ValueError as exc:
            raise ConfigError(f"invalid physics for {self.name!r}: {exc}") from exc

    def initial_profile(self, profile_name: str, options: dict, spec: GridSpec) -> Callable:
        try:
            builder = self.profiles[profile_name]
        except KeyError:
            raise ConfigError(
                f"unknown initial profile {profile_name!r} for {self.name!r}; "
                f"available: {', '.join(sorted(self.profiles))}"
            ) from None
        return builder(spec, options)

    def speed_bound(self, grid: StateGrid, params) -> float:
        """Max over cells of the per-cell eigenvalue bound; sizes step one."""
        return _SPEED_BOUNDS[self.solver_name](grid, params, self.ndim)


_PARAM_BUILDERS = {
    "acoustics": lambda v: AcousticsParams(
        sound_speed=v["sound_speed"], impedance=v["impedance"]
    ),
    "shallow_water": lambda v: ShallowWaterParams(gravity=v["gravity"]),
    "advection": lambda v: AdvectionParams(speed=v["speed"]),
}


def _acoustics_bound(grid: StateGrid, params: AcousticsParams, ndim: int) -> float:
    return params.sound_speed


def _shallow_water_bound(grid: StateGrid, params: ShallowWaterParams, ndim: int) -> float:
    h = grid.interior(0)
    if np.any(h <= 0.0):
        raise DryStateError("non-positive depth in initial data")
    c = np.sqrt(params.gravity * h)
    vmax = np.abs(grid.interior(1)) / h
    for s in range(2, grid.num_states):
        vmax = np.maximum(vmax, np.abs(grid.interior(s)) / h)
    return float(np.max(vmax + c))


def _advection_bound(grid: StateGrid, params: AdvectionParams, ndim: int) -> float:
    return abs(params.speed)


_SPEED_BOUNDS = {
    "acoustics": _acoustics_bound,
    "shallow_water": _shallow_water_bound,
    "advection": _advection_bound,
}


# --------------------------------------------------------------------------
# Initial profiles


def _zeros_like_stack(lead: np.ndarray, count: int) -> list[np.ndarray]:
    return [np.zeros_like(lead) for _ in range(count)]


def _gaussian_pressure(spec: GridSpec, options: dict):
    opts = _take(options, spec, {
        "amplitude": 1.0,
        "width": lambda s: 0.1 * min(_extent(s, a) for a in range(s.ndim)),
        "center": _domain_center,
    })
    center = opts["center"]
    if np.isscalar(center):
        center = (float(center),) * spec.ndim
    if len(center) != spec.ndim:
        raise ConfigError(f"center needs {spec.ndim} coordinates")
    amp, width = float(opts["amplitude"]), float(opts["width"])
    if width <= 0.0:
        raise ConfigError("width must be positive")

    def profile(*coords):
        r2 = sum((c - c0) ** 2 for c, c0 in zip(coords, center))
        p = amp * np.exp(-r2 / width**2)
        return np.stack([p] + _zeros_like_stack(p, spec.num_states - 1))

    return profile


def _sine_product_pressure(spec: GridSpec, options: dict):
    opts = _take(options, spec, {"amplitude": 1.0, "wavenumber": 1.0})
    amp = float(opts["amplitude"])
    k = float(opts["wavenumber"])

    def profile(*coords):
        p = np.full_like(coords[0], amp)
        for axis, c in enumerate(coords):
            phase = 2.0 * math.pi * k * (c - spec.lower[axis]) / _extent(spec, axis)
            p = p * np.sin(phase)
        return np.stack([p] + _zeros_like_stack(p, spec.num_states - 1))

    return profile


def _lake_at_rest(spec: GridSpec, options: dict):
    opts = _take(options, spec, {"depth": 1.0})
    depth = float(opts["depth"])
    if depth <= 0.0:
        raise ConfigError("depth must be positive")

    def profile(*coords):
        h = np.full_like(coords[0], depth)
        return np.stack([h] + _zeros_like_stack(h, spec.num_states - 1))

    return profile


def _gaussian_hump(spec: GridSpec, options: dict):
    opts = _take(options, spec, {
        "base_depth": 1.0,
        "amplitude": 0.5,
        "width": lambda s: 0.1 * min(_extent(s, a) for a in range(s.ndim)),
        "center": _domain_center,
    })
    base = float(opts["base_depth"])
    amp = float(opts["amplitude"])
    width = float(opts["width"])
    center = opts["center"]
    if np.isscalar(center):
        center = (float(center),) * spec.ndim
    if base <= 0.0 or base + amp <= 0.0:
        raise ConfigError("depth must stay positive everywhere")
    if width <= 0.0:
        raise ConfigError("width must be positive")

    def profile(*coords):
        r2 = sum((c - c0) ** 2 for c, c0 in zip(coords, center))
        h = base + amp * np.exp(-r2 / width**2)
        return np.stack([h] + _zeros_like_stack(h, spec.num_states - 1))

    return profile


def _dam_break(spec: GridSpec, options: dict):
    opts = _take(options, spec, {
        "h_left": 2.0,
        "h_right": 1.0,
        "position": lambda s: _domain_center(s)[0],
    })
    hl = float(opts["h_left"])
    hr = float(opts["h_right"])
    x0 = float(opts["position"])
    if hl <= 0.0 or hr <= 0.0:
        raise ConfigError("dam break depths must be positive")

    def profile(*coords):
        x = coords[0]
        h = np.where(x < x0, hl, hr)
        return np.stack([h] + _zeros_like_stack(h, spec.num_states - 1))

    return profile


def _advect_sine(spec: GridSpec, options: dict):
    opts = _take(options, spec, {"mean": 1.0, "amplitude": 0.5, "wavenumber": 1.0})
    mean = float(opts["mean"])
    amp = float(opts["amplitude"])
    k = float(opts["wavenumber"])

    def profile(x):
        phase = 2.0 * math.pi * k * (x - spec.lower[0]) / _extent(spec, 0)
        return np.stack([mean + amp * np.sin(phase)])

    return profile


def _advect_square(spec: GridSpec, options: dict):
    opts = _take(options, spec, {
        "left": lambda s: s.lower[0] + 0.25 * _extent(s, 0),
        "right": lambda s: s.lower[0] + 0.5 * _extent(s, 0),
        "inside": 1.0,
        "outside": 0.0,
    })
    a, b = float(opts["left"]), float(opts["right"])
    if b <= a:
        raise ConfigError("square pulse needs left < right")
    inside, outside = float(opts["inside"]), float(opts["outside"])

    def profile(x):
        return np.stack([np.where((x >= a) & (x < b), inside, outside)])

    return profile


def _advect_gaussian(spec: GridSpec, options: dict):
    opts = _take(options, spec, {
        "amplitude": 1.0,
        "width": lambda s: 0.1 * _extent(s, 0),
        "center": lambda s: _domain_center(s)[0],
    })
    amp, width, c0 = float(opts["amplitude"]), float(opts["width"]), float(opts["center"])
    if width <= 0.0:
        raise ConfigError("width must be positive")

    def profile(x):
        return np.stack([amp * np.exp(-((x - c0) ** 2) / width**2)])

    return profile


# --------------------------------------------------------------------------
# Registry


def _acoustics_problem(ndim: int) -> Problem:
    fields = ("pressure", "x_velocity", "y_velocity", "z_velocity")[: ndim + 1]
    return Problem(
        name=f"acoustics{ndim}d",
        ndim=ndim,
        num_states=ndim + 1,
        solver_name="acoustics",
        field_names=fields,
        normal_velocity=tuple(range(1, ndim + 1)),
        physics_keys={"sound_speed": 1.0, "impedance": 1.0},
        profiles={
            "gaussian_pressure": _gaussian_pressure,
            "sine_product": _sine_product_pressure,
        },
    )


PROBLEMS: dict[str, Problem] = {
    "acoustics2d": _acoustics_problem(2),
    "acoustics3d": _acoustics_problem(3),
    "shallow_water2d": Problem(
        name="shallow_water2d",
        ndim=2,
        num_states=3,
        solver_name="shallow_water",
        field_names=("depth", "x_momentum", "y_momentum"),
        normal_velocity=(1, 2),
        physics_keys={"gravity": 1.0},
        profiles={
            "lake_at_rest": _lake_at_rest,
            "gaussian_hump": _gaussian_hump,
            "dam_break": _dam_break,
        },
    ),
    "advection1d": Problem(
        name="advection1d",
        ndim=1,
        num_states=1,
        solver_name="advection",
        field_names=("tracer",),
        normal_velocity=(None,),
        physics_keys={"speed": 1.0},
        profiles={
            "sine": _advect_sine,
            "square": _advect_square,
            "gaussian": _advect_gaussian,
        },
    ),
}


def get_problem(name: str) -> Problem:
    try:
        return PROBLEMS[name]
    except KeyError:
        raise ConfigError(
            f"unknown problem {name!r}; available: {', '.join(sorted(PROBLEMS))}"
        ) from None
