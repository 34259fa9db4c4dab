"""Cell-centered grid state in structure-of-arrays layout.

State is stored as one padded C-contiguous array per run, shaped
``(num_states, [nz+4,] [ny+4,] nx+4)`` so that each state variable is
contiguous and x is the fastest-varying index.  Two ghost layers surround
the interior on every side; ghost depth is fixed because the second-order
stencil reads exactly two cells past each interface it updates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

#: Ghost layers per side.  The update stencil for one cell spans five cells,
#: so two layers are necessary and sufficient for a single-step sweep.
GHOST = 2

#: Supported floating point precisions, keyed by config name.
DTYPES = {"single": np.float32, "double": np.float64}


@dataclass(frozen=True)
class GridSpec:
    """Geometry and state-count description of a run.

    ``cells``, ``lower`` and ``upper`` are given in logical axis order
    (x, y[, z]).  Arrays built from a GridSpec reverse that order so x ends
    up last (fastest) in memory.
    """

    cells: tuple[int, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    num_states: int
    ghost: int = GHOST

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(int(c) for c in self.cells))
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        nd = len(self.cells)
        if not 1 <= nd <= 3:
            raise ValueError(f"grid must be 1-, 2- or 3-dimensional, got {nd} axes")
        if len(self.lower) != nd or len(self.upper) != nd:
            raise ValueError("cells, lower and upper must have matching lengths")
        if any(c < 1 for c in self.cells):
            raise ValueError(f"every axis needs at least one cell, got {self.cells}")
        if any(u <= l for l, u in zip(self.lower, self.upper)):
            raise ValueError("upper bound must exceed lower bound on every axis")
        if self.num_states < 1:
            raise ValueError("num_states must be positive")
        if self.ghost != GHOST:
            raise ValueError(f"ghost depth is fixed at {GHOST}")

    @property
    def ndim(self) -> int:
        return len(self.cells)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(
            (u - l) / c for l, u, c in zip(self.lower, self.upper, self.cells)
        )

    @property
    def padded(self) -> tuple[int, ...]:
        """Per-axis cell counts including ghost layers, logical order."""
        return tuple(c + 2 * self.ghost for c in self.cells)

    @property
    def interior_array_shape(self) -> tuple[int, ...]:
        """Interior shape in array (reversed, x-last) order."""
        return tuple(reversed(self.cells))

    @property
    def padded_array_shape(self) -> tuple[int, ...]:
        return tuple(reversed(self.padded))

    @property
    def num_cells(self) -> int:
        n = 1
        for c in self.cells:
            n *= c
        return n

    @property
    def cell_volume(self) -> float:
        v = 1.0
        for d in self.spacing:
            v *= d
        return v

    def axis_centers(self, axis: int, dtype=np.float64) -> np.ndarray:
        """Interior cell-center coordinates along one logical axis."""
        d = self.spacing[axis]
        i = np.arange(self.cells[axis], dtype=np.float64)
        return ((self.lower[axis] + (i + 0.5) * d)).astype(dtype)

    def element_strides(self) -> tuple[int, ...]:
        """Flat-index stride of each logical axis within one padded state."""
        strides = []
        acc = 1
        for ax in range(self.ndim):
            strides.append(acc)
            acc *= self.padded[ax]
        return tuple(strides)


def linear_index(spec: GridSpec, coords: Sequence[int]) -> int:
    """Flat offset of a padded cell within one state variable.

    ``coords`` are per-axis indices in logical order (x first), counted
    from the padded corner, i.e. ghost cells included.
    """
    if len(coords) != spec.ndim:
        raise IndexError(f"expected {spec.ndim} coordinates, got {len(coords)}")
    off = 0
    for ax in reversed(range(spec.ndim)):
        c = coords[ax]
        if not 0 <= c < spec.padded[ax]:
            raise IndexError(
                f"coordinate {c} out of range [0, {spec.padded[ax]}) on axis {ax}"
            )
        off = off * spec.padded[ax] + c
    return off


def index_coords(spec: GridSpec, offset: int) -> tuple[int, ...]:
    """Inverse of :func:`linear_index`."""
    total = 1
    for p in spec.padded:
        total *= p
    if not 0 <= offset < total:
        raise IndexError(f"offset {offset} out of range [0, {total})")
    coords = []
    for ax in range(spec.ndim):
        coords.append(offset % spec.padded[ax])
        offset //= spec.padded[ax]
    return tuple(coords)


class StateGrid:
    """Padded solution storage plus views into it.

    The backing array is never reallocated after construction; sweeps and
    boundary fills write into it in place.  Distinct :class:`StateGrid`
    instances never alias each other's memory.
    """

    def __init__(self, spec: GridSpec, dtype=np.float64):
        self.spec = spec
        self.dtype = np.dtype(dtype)
        if self.dtype not in (np.dtype(np.float32), np.dtype(np.float64)):
            raise ValueError(f"unsupported dtype {dtype}; use float32 or float64")
        self.data = np.zeros(
            (spec.num_states,) + spec.padded_array_shape, dtype=self.dtype
        )

    @property
    def num_states(self) -> int:
        return self.spec.num_states

    def _interior_slices(self) -> tuple[slice, ...]:
        g = self.spec.ghost
        return tuple(slice(g, -g) for _ in range(self.spec.ndim))

    def state(self, s: int) -> np.ndarray:
        """Padded view of one state variable, array (x-last) order."""
        return self.data[s]

    def interior(self, s: int | None = None) -> np.ndarray:
        """Ghost-free view; all states stacked when ``s`` is None."""
        sl = self._interior_slices()
        if s is None:
            return self.data[(slice(None),) + sl]
        return self.data[(s,) + sl]

    def centers(self) -> tuple[np.ndarray, ...]:
        """Interior center-coordinate arrays (x, y[, z]), each shaped like
        the interior in array order."""
        axes = [self.spec.axis_centers(ax) for ax in range(self.spec.ndim)]
        if self.spec.ndim == 1:
            return (axes[0],)
        mesh = np.meshgrid(*reversed(axes), indexing="ij")
        return tuple(reversed(mesh))

    def copy(self) -> "StateGrid":
        out = StateGrid(self.spec, self.dtype)
        np.copyto(out.data, self.data)
        return out

    def copy_from(self, other: "StateGrid") -> None:
        if other.spec != self.spec or other.dtype != self.dtype:
            raise ValueError("grid copy requires identical spec and dtype")
        np.copyto(self.data, other.data)

    def flat_states(self) -> np.ndarray:
        """(num_states, padded_cells) view used by the sweep kernels."""
        return self.data.reshape(self.spec.num_states, -1)


def create_grid(spec: GridSpec, dtype=np.float64) -> StateGrid:
    """Allocate a zero-initialized padded grid."""
    return StateGrid(spec, dtype)


def fill_initial(grid: StateGrid, profile: Callable[..., object]) -> None:
    """Evaluate ``profile`` at interior cell centers and store the result.

    ``profile`` receives one coordinate array per axis (x, y[, z]) and must
    return something broadcastable to ``(num_states,) + interior``, e.g. a
    plain tuple of per-state constants.  Ghost cells are left untouched.
    Non-finite values are rejected outright rather than letting them
    surface later as a mid-run blowup.
    """
    spec = grid.spec
    target = (spec.num_states,) + spec.interior_array_shape
    vals = np.asarray(profile(*grid.centers()), dtype=grid.dtype)
    if vals.shape != target:
        if vals.shape == (spec.num_states,):
            vals = vals.reshape((spec.num_states,) + (1,) * spec.ndim)
        try:
            vals = np.broadcast_to(vals, target)
        except ValueError:
            raise ValueError(
                f"initial profile produced shape {vals.shape}, "
                f"expected broadcastable to {target}"
            ) from None
    if not np.all(np.isfinite(vals)):
        raise ValueError("initial profile produced non-finite values")
    grid.interior()[...] = vals
