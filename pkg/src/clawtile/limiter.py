"""Total-variation-diminishing flux limiters.

Limiters act on waves, not raw gradients: the smoothness ratio for a wave
is the projection of the upwind-side wave onto it,
``theta = <w_up, w> / <w, w>``.  A degenerate wave (zero self inner
product) passes through unlimited.
"""

from __future__ import annotations

import enum

import numpy as np


class LimiterKind(enum.Enum):
    NONE = "none"
    MINMOD = "minmod"
    SUPERBEE = "superbee"
    MC = "mc"
    VANLEER = "vanleer"

    @classmethod
    def from_name(cls, name: str) -> "LimiterKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown limiter {name!r}; choose one of: {names}") from None


#: Stable integer ids handed to compiled kernels.
LIMITER_IDS = {
    LimiterKind.NONE: 0,
    LimiterKind.MINMOD: 1,
    LimiterKind.SUPERBEE: 2,
    LimiterKind.MC: 3,
    LimiterKind.VANLEER: 4,
}


def phi(theta: float, kind: LimiterKind) -> float:
    """Limiter function value at smoothness ratio ``theta``."""
    if kind is LimiterKind.NONE:
        return 1.0
    if kind is LimiterKind.MINMOD:
        return max(0.0, min(1.0, theta))
    if kind is LimiterKind.SUPERBEE:
        return max(0.0, min(1.0, 2.0 * theta), min(2.0, theta))
    if kind is LimiterKind.MC:
        return max(0.0, min(0.5 * (1.0 + theta), 2.0, 2.0 * theta))
    if kind is LimiterKind.VANLEER:
        a = abs(theta)
        return (theta + a) / (1.0 + a)
    raise ValueError(f"unknown limiter kind {kind!r}")


def limit_wave(wave: np.ndarray, wave_upwind: np.ndarray, kind: LimiterKind) -> np.ndarray:
    """Scale ``wave`` by the limiter evaluated on its upwind projection."""
    w = np.asarray(wave, dtype=np.float64)
    wu = np.asarray(wave_upwind, dtype=np.float64)
    if w.shape != wu.shape:
        raise ValueError("wave and upwind wave must have the same shape")
    wn = float(np.dot(w, w))
    if wn == 0.0:
        return w.copy()
    theta = float(np.dot(wu, w)) / wn
    return phi(theta, kind) * w
