"""Ghost-cell fill for the supported boundary conditions.

Ghost layers are filled from current interior data immediately before
each directional sweep.  Faces are processed in a fixed order (x low,
x high, y low, y high, z low, z high) so corner ghost cells, which later
faces read from earlier ones, come out the same on every run.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .grid import StateGrid


class BoundaryKind(enum.Enum):
    OUTFLOW = "outflow"
    REFLECTIVE = "reflective"
    PERIODIC = "periodic"

    @classmethod
    def from_name(cls, name: str) -> "BoundaryKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ConfigError(f"unknown boundary kind {name!r}; choose one of: {names}") from None


@dataclass(frozen=True)
class BoundarySpec:
    """Per-axis (low, high) boundary kinds plus reflective metadata.

    ``normal_velocity`` names, per axis, the state index whose sign flips
    under reflection; ``None`` where the problem has no velocity along
    that axis (reflective walls are then rejected).
    """

    sides: tuple[tuple[BoundaryKind, BoundaryKind], ...]
    normal_velocity: tuple[int | None, ...]

    def __post_init__(self):
        object.__setattr__(self, "sides", tuple(tuple(pair) for pair in self.sides))
        object.__setattr__(self, "normal_velocity", tuple(self.normal_velocity))
        if len(self.sides) != len(self.normal_velocity):
            raise ConfigError("boundary sides and normal_velocity length mismatch")
        for axis, (lo, hi) in enumerate(self.sides):
            if (lo is BoundaryKind.PERIODIC) != (hi is BoundaryKind.PERIODIC):
                raise ConfigError(
                    f"periodic boundary on axis {axis} must be set on both sides"
                )
            for kind in (lo, hi):
                if kind is BoundaryKind.REFLECTIVE and self.normal_velocity[axis] is None:
                    raise ConfigError(
                        f"reflective boundary on axis {axis} needs a normal velocity state"
                    )

    @classmethod
    def uniform(cls, kind: BoundaryKind, normal_velocity: tuple[int | None, ...]) -> "BoundarySpec":
        return cls(
            sides=tuple((kind, kind) for _ in normal_velocity),
            normal_velocity=normal_velocity,
        )

    def is_periodic(self, axis: int) -> bool:
        return self.sides[axis][0] is BoundaryKind.PERIODIC


def _axis_slicer(grid: StateGrid, axis: int):
    """Return a function building full-array index tuples that select an
    index range along one logical axis (state axis included)."""
    nd = grid.spec.ndim
    arr_axis = 1 + (nd - 1 - axis)  # logical x is the last array axis

    def slicer(rng) -> tuple:
        idx = [slice(None)] * (nd + 1)
        idx[arr_axis] = rng
        return tuple(idx)

    return slicer


def apply_boundary(grid: StateGrid, bspec: BoundarySpec) -> None:
    """Fill all ghost layers of ``grid`` in place.

    Interior cells are never written.  Filling is idempotent for a fixed
    interior: running it twice leaves the ghost layers unchanged.
    """
    spec = grid.spec
    if len(bspec.sides) != spec.ndim:
        raise ConfigError(
            f"boundary spec covers {len(bspec.sides)} axes, grid has {spec.ndim}"
        )
    g = spec.ghost
    data = grid.data
    for axis in range(spec.ndim):
        n = spec.cells[axis]
        sl = _axis_slicer(grid, axis)
        lo_kind, hi_kind = bspec.sides[axis]
        nvel = bspec.normal_velocity[axis]
        if nvel is not None and not 0 <= nvel < spec.num_states:
            raise ConfigError(f"normal velocity index {nvel} out of range on axis {axis}")

        if lo_kind is BoundaryKind.OUTFLOW:
            data[sl(slice(0, g))] = data[sl(slice(g, g + 1))]
        elif lo_kind is BoundaryKind.PERIODIC:
            data[sl(slice(0, g))] = data[sl(slice(n, n + g))]
        else:  # reflective: mirror first interior cells, flip normal velocity
            data[sl(slice(0, g))] = data[sl(slice(2 * g - 1, g - 1, -1))]
            data[(nvel,) + sl(slice(0, g))[1:]] *= -1.0

        if hi_kind is BoundaryKind.OUTFLOW:
            data[sl(slice(n + g, n + 2 * g))] = data[sl(slice(n + g - 1, n + g))]
        elif hi_kind is BoundaryKind.PERIODIC:
            data[sl(slice(n + g, n + 2 * g))] = data[sl(slice(g, 2 * g))]
        else:
            data[sl(slice(n + g, n + 2 * g))] = data[sl(slice(n + g - 1, n - 1, -1))]
            data[(nvel,) + sl(slice(n + g, n + 2 * g))[1:]] *= -1.0
