"""Point-wise Riemann solvers and the pluggable solver registry.

A solver is a scalar routine acting on a single pair of adjacent cell
states.  It decomposes the jump into waves with associated speeds and
writes them into caller-provided scratch:

    scalar(q_l, q_r, normal, params, waves_out, speeds_out)

where ``q_l``/``q_r`` are ``(num_states,)`` vectors, ``normal`` is the
state index holding the velocity component normal to the interface,
``params`` is a flat parameter vector, ``waves_out`` is
``(num_waves, num_states)`` and ``speeds_out`` is ``(num_waves,)``.

The same routine runs two ways: interpreted, through the convenience
wrappers below, and JIT-compiled inside the sweep kernels.  Writing it as
straight scalar arithmetic (no numpy temporaries, no dtype literals)
guarantees both paths produce bit-identical results at either precision.
Registered user solvers must follow the same discipline.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit

from .errors import DryStateError

_SUPPORTED = (np.dtype(np.float32), np.dtype(np.float64))


@dataclass(frozen=True)
class WaveFan:
    """Jump decomposition at one interface: waves stacked with speeds."""

    waves: np.ndarray  # (num_waves, num_states)
    speeds: np.ndarray  # (num_waves,)

    def __post_init__(self):
        if self.waves.ndim != 2 or self.speeds.ndim != 1:
            raise ValueError("waves must be 2-D and speeds 1-D")
        if self.waves.shape[0] != self.speeds.shape[0]:
            raise ValueError("wave count and speed count disagree")

    @property
    def num_waves(self) -> int:
        return self.speeds.shape[0]

    @property
    def num_states(self) -> int:
        return self.waves.shape[1]

    def max_abs_speed(self) -> float:
        return float(np.max(np.abs(self.speeds))) if self.num_waves else 0.0


@dataclass(frozen=True)
class Fluctuations:
    """Signed flux contributions of a fan: left-going and right-going."""

    amdq: np.ndarray
    apdq: np.ndarray


def fluctuations(fan: WaveFan) -> Fluctuations:
    """Split a fan into left-going and right-going flux differences.

    ``amdq`` collects ``s * w`` over strictly negative speeds, ``apdq``
    over strictly positive ones.  Zero-speed waves move nothing and land
    in neither sum.
    """
    neg = fan.speeds < 0.0
    pos = fan.speeds > 0.0
    amdq = (fan.speeds[neg, None] * fan.waves[neg]).sum(axis=0)
    apdq = (fan.speeds[pos, None] * fan.waves[pos]).sum(axis=0)
    z = np.zeros(fan.num_states, dtype=fan.waves.dtype)
    return Fluctuations(amdq=z + amdq, apdq=z + apdq)


# --------------------------------------------------------------------------
# Parameter containers


@dataclass(frozen=True)
class AcousticsParams:
    """Linear acoustics medium: sound speed and impedance."""

    sound_speed: float = 1.0
    impedance: float = 1.0

    def __post_init__(self):
        if self.sound_speed <= 0.0 or self.impedance <= 0.0:
            raise ValueError("sound speed and impedance must be positive")


@dataclass(frozen=True)
class ShallowWaterParams:
    gravity: float = 1.0

    def __post_init__(self):
        if self.gravity <= 0.0:
            raise ValueError("gravity must be positive")


@dataclass(frozen=True)
class AdvectionParams:
    speed: float = 1.0


# --------------------------------------------------------------------------
# Scalar solver routines


def _acoustics_scalar(ql, qr, normal, params, W, s):
    # params = [c, Z, 1/(2Z)]; states (p, u[, v[, w]]), transverse untouched
    c = params[0]
    Z = params[1]
    inv2z = params[2]
    dp = qr[0] - ql[0]
    dun = qr[normal] - ql[normal]
    b1 = (Z * dun - dp) * inv2z
    b2 = (Z * dun + dp) * inv2z
    for k in range(W.shape[1]):
        W[0, k] = 0
        W[1, k] = 0
    W[0, 0] = -Z * b1
    W[0, normal] = b1
    W[1, 0] = Z * b2
    W[1, normal] = b2
    s[0] = -c
    s[1] = c


def _shallow_water_scalar(ql, qr, normal, params, W, s):
    # params = [g, 0.5]; states (h, hu, hv); sqrt-weighted average state
    g = params[0]
    half = params[1]
    trans = 3 - normal
    hl = ql[0]
    hr = qr[0]
    sl = np.sqrt(hl)
    sr = np.sqrt(hr)
    denom = sl + sr
    uhat = (ql[normal] / sl + qr[normal] / sr) / denom
    vhat = (ql[trans] / sl + qr[trans] / sr) / denom
    chat = np.sqrt(g * (half * (hl + hr)))
    dh = qr[0] - ql[0]
    dhun = qr[normal] - ql[normal]
    dhut = qr[trans] - ql[trans]
    inv2c = half / chat
    a1 = ((uhat + chat) * dh - dhun) * inv2c
    a3 = (dhun - (uhat - chat) * dh) * inv2c
    a2 = dhut - vhat * dh
    W[0, 0] = a1
    W[0, normal] = a1 * (uhat - chat)
    W[0, trans] = a1 * vhat
    W[1, 0] = 0
    W[1, normal] = 0
    W[1, trans] = a2
    W[2, 0] = a3
    W[2, normal] = a3 * (uhat + chat)
    W[2, trans] = a3 * vhat
    s[0] = uhat - chat
    s[1] = uhat
    s[2] = uhat + chat


def _advection_scalar(ql, qr, normal, params, W, s):
    # params = [u]; single state, single wave
    W[0, 0] = qr[0] - ql[0]
    s[0] = params[0]


# --------------------------------------------------------------------------
# Registry


class RiemannSolver:
    """Registry record binding a scalar routine to its metadata.

    ``pack_params`` flattens a parameter object into the vector the scalar
    routine reads; values derived from parameters (reciprocals, constants)
    are precomputed here, in the run's dtype, so the hot loop never mixes
    precisions.  ``normal_index`` maps a sweep axis (0=x, 1=y, 2=z) to the
    state index of the normal velocity.
    """

    def __init__(
        self,
        name: str,
        num_waves: int,
        scalar: Callable,
        pack_params: Callable[[object, np.dtype], np.ndarray],
        normal_index: Callable[[int], int] = lambda axis: 1 + axis,
    ):
        if num_waves < 1:
            raise ValueError("a solver must produce at least one wave")
        self.name = name
        self.num_waves = num_waves
        self.scalar = scalar
        self.pack_params = pack_params
        self.normal_index = normal_index
        self._compiled = None

    @property
    def compiled(self):
        """The scalar routine under JIT, compiled on first use."""
        if self._compiled is None:
            self._compiled = njit(nogil=True)(self.scalar)
        return self._compiled

    def solve(self, q_l, q_r, axis: int, params: object) -> WaveFan:
        """Interpreted single-interface solve returning a :class:`WaveFan`."""
        ql = np.asarray(q_l)
        qr = np.asarray(q_r)
        if ql.shape != qr.shape or ql.ndim != 1:
            raise ValueError("q_l and q_r must be equal-length 1-D state vectors")
        dt = np.result_type(ql, qr)
        if dt not in _SUPPORTED:
            dt = np.dtype(np.float64)
        ql = ql.astype(dt, copy=False)
        qr = qr.astype(dt, copy=False)
        m = ql.shape[0]
        n = self.normal_index(axis)
        if m > 1 and not 0 <= n < m:
            raise ValueError(f"normal index {n} out of range for {m} states")
        W = np.zeros((self.num_waves, m), dtype=dt)
        s = np.zeros(self.num_waves, dtype=dt)
        self.scalar(ql, qr, n, self.pack_params(params, dt), W, s)
        return WaveFan(waves=W, speeds=s)


def _pack_acoustics(p: AcousticsParams, dtype) -> np.ndarray:
    out = np.zeros(3, dtype=dtype)
    out[0] = p.sound_speed
    out[1] = p.impedance
    out[2] = np.dtype(dtype).type(0.5) / out[1]
    return out


def _pack_shallow_water(p: ShallowWaterParams, dtype) -> np.ndarray:
    out = np.zeros(2, dtype=dtype)
    out[0] = p.gravity
    out[1] = 0.5
    return out


def _pack_advection(p: AdvectionParams, dtype) -> np.ndarray:
    out = np.zeros(1, dtype=dtype)
    out[0] = p.speed
    return out


_REGISTRY: dict[str, RiemannSolver] = {}


def register_solver(solver: RiemannSolver, overwrite: bool = False) -> None:
    if solver.name in _REGISTRY and not overwrite:
        raise ValueError(f"solver {solver.name!r} is already registered")
    _REGISTRY[solver.name] = solver


def get_solver(name: str) -> RiemannSolver:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(
            f"unknown solver {name!r}; registered: {sorted(_REGISTRY)}"
        ) from None


def solver_names() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


register_solver(RiemannSolver("acoustics", 2, _acoustics_scalar, _pack_acoustics))
register_solver(RiemannSolver("shallow_water", 3, _shallow_water_scalar, _pack_shallow_water))
register_solver(
    RiemannSolver(
        "advection", 1, _advection_scalar, _pack_advection, normal_index=lambda axis: 0
    )
)


# --------------------------------------------------------------------------
# Convenience wrappers


def acoustics_normal(q_l, q_r, axis: int, params: AcousticsParams) -> WaveFan:
    """Two acoustic waves at speeds -c and +c.

    The jump splits as ``b1 = (Z du_n - dp) / (2Z)`` carried by
    ``(-Z, e_n)`` and ``b2 = (Z du_n + dp) / (2Z)`` carried by
    ``(Z, e_n)``; transverse velocity components do not participate.
    """
    return get_solver("acoustics").solve(q_l, q_r, axis, params)


def shallow_water_normal(q_l, q_r, axis: int, params: ShallowWaterParams) -> WaveFan:
    """Three-wave linearized decomposition about the sqrt-weighted average.

    Average velocities use sqrt(h) weights and the average celerity is
    ``sqrt(g (h_l + h_r) / 2)``, which makes the decomposition conserve
    the exact flux difference across the interface.  The middle wave is a
    contact carrying only transverse momentum.  No entropy correction is
    applied to transonic rarefactions.
    """
    ql = np.asarray(q_l, dtype=np.float64)
    qr = np.asarray(q_r, dtype=np.float64)
    if ql.shape != (3,) or qr.shape != (3,):
        raise ValueError("shallow water states are (h, hu, hv)")
    if ql[0] <= 0.0 or qr[0] <= 0.0:
        raise DryStateError(f"non-positive depth at interface: h_l={ql[0]}, h_r={qr[0]}")
    return get_solver("shallow_water").solve(q_l, q_r, axis, params)


def advection_normal(q_l, q_r, axis: int, params: AdvectionParams) -> WaveFan:
    """Single wave carrying the full jump at the transport speed."""
    return get_solver("advection").solve(q_l, q_r, axis, params)
