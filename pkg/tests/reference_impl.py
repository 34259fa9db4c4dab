"""Plain, slow reference versions of the numerical pieces under test.

Everything here is written the straightforward textbook way: one loop per
concept, grid-sized intermediates, float64 throughout, no fusion and no
compilation.  The production sweep must reproduce these results; sharing
no code with it is the point.
"""

import numpy as np

from clawtile.grid import StateGrid
from clawtile.limiter import LimiterKind


# -- limiters ----------------------------------------------------------------

LIMITERS = {
    LimiterKind.NONE: lambda th: 1.0,
    LimiterKind.MINMOD: lambda th: max(0.0, min(1.0, th)),
    LimiterKind.SUPERBEE: lambda th: max(0.0, min(1.0, 2.0 * th), min(2.0, th)),
    LimiterKind.MC: lambda th: max(0.0, min((1.0 + th) / 2.0, 2.0, 2.0 * th)),
    LimiterKind.VANLEER: lambda th: (th + abs(th)) / (1.0 + abs(th)),
}


# -- physical flux functions -------------------------------------------------

def acoustics_flux(q, axis, params):
    c = params.sound_speed
    z = params.impedance
    f = np.zeros_like(np.asarray(q, dtype=np.float64))
    f[0] = z * c * q[1 + axis]
    f[1 + axis] = (c / z) * q[0]
    return f


def shallow_water_flux(q, axis, params):
    h, hu, hv = float(q[0]), float(q[1]), float(q[2])
    g = params.gravity
    momenta = [hu, hv]
    un = momenta[axis] / h
    f = np.empty(3)
    f[0] = momenta[axis]
    f[1] = hu * un
    f[2] = hv * un
    f[1 + axis] += 0.5 * g * h * h
    return f


def advection_flux(q, axis, params):
    return params.speed * np.asarray(q, dtype=np.float64)


FLUXES = {
    "acoustics": acoustics_flux,
    "shallow_water": shallow_water_flux,
    "advection": advection_flux,
}


# -- second-order wave-propagation sweep --------------------------------------

def _pencil_update(q, dtdx, solver, axis, kind, params):
    """Update the interior cells of one 1D pencil (states x padded cells)."""
    m, ntot = q.shape
    ghost = 2
    phi = LIMITERS[kind]

    waves = [None] * ntot  # interface between cells i-1 and i, keyed by i
    speeds = [None] * ntot
    for i in range(1, ntot):
        fan = solver.solve(q[:, i - 1].copy(), q[:, i].copy(), axis, params)
        waves[i] = np.asarray(fan.waves, dtype=np.float64)
        speeds[i] = np.asarray(fan.speeds, dtype=np.float64)
    smax = max(float(np.max(np.abs(s))) for s in speeds[1:])

    amdq = [None] * ntot
    apdq = [None] * ntot
    for i in range(1, ntot):
        am = np.zeros(m)
        ap = np.zeros(m)
        for p in range(len(speeds[i])):
            sp = speeds[i][p]
            if sp < 0.0:
                am += sp * waves[i][p]
            elif sp > 0.0:
                ap += sp * waves[i][p]
        amdq[i] = am
        apdq[i] = ap

    ftilde = [None] * ntot
    for i in range(ghost, ntot - ghost + 1):
        ft = np.zeros(m)
        for p in range(len(speeds[i])):
            sp = speeds[i][p]
            w = waves[i][p]
            norm = float(w @ w)
            if kind is LimiterKind.NONE or norm == 0.0:
                lim = 1.0
            else:
                upwind = waves[i - 1][p] if sp > 0.0 else waves[i + 1][p]
                lim = phi(float(upwind @ w) / norm)
            ft += 0.5 * abs(sp) * (1.0 - dtdx * abs(sp)) * lim * w
        ftilde[i] = ft

    out = q.copy()
    for j in range(ghost, ntot - ghost):
        out[:, j] = (
            q[:, j]
            - dtdx * (apdq[j] + amdq[j + 1])
            - dtdx * (ftilde[j + 1] - ftilde[j])
        )
    return out, smax


def reference_sweep(q_in: StateGrid, axis, dt, solver, kind, params):
    """One directional sweep over every interior pencil.

    Returns (padded float64 array with updated interior, max wave speed).
    Ghost cells pass through unchanged.
    """
    spec = q_in.spec
    ghost = spec.ghost
    arr_axis = 1 + (spec.ndim - 1 - axis)
    work = np.moveaxis(np.asarray(q_in.data, dtype=np.float64), arr_axis, -1)
    out = work.copy()
    dtdx = dt / spec.spacing[axis]

    transverse = work.shape[1:-1]
    smax = 0.0
    for idx in np.ndindex(*transverse):
        if any(c < ghost or c >= size - ghost for c, size in zip(idx, transverse)):
            continue
        sel = (slice(None), *idx, slice(None))
        out[sel], pencil_max = _pencil_update(
            work[sel], dtdx, solver, axis, kind, params
        )
        smax = max(smax, pencil_max)
    return np.moveaxis(out, -1, arr_axis), smax
