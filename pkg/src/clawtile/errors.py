"""Exception types raised by the solver framework."""

from __future__ import annotations


class ClawtileError(Exception):
    """Base class for all framework errors."""


class ConfigError(ClawtileError):
    """Invalid or malformed run configuration.

    Carries the offending key or section name when known so callers can
    point users at the exact line of their config file.
    """

    def __init__(self, message: str, *, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        parts = [message]
        if key is not None:
            parts.append(f"(key: {key})")
        if line is not None:
            parts.append(f"(line {line})")
        super().__init__(" ".join(parts))


class DryStateError(ClawtileError):
    """A shallow-water state with non-positive depth reached a Riemann solve."""


class NumericalBlowup(ClawtileError):
    """A sweep produced a NaN or Inf in the interior.

    Attributes identify the first offending location so the failure can be
    traced back to a cell rather than a whole run.
    """

    def __init__(self, state: int, cell: tuple[int, ...], step: int):
        self.state = state
        self.cell = cell
        self.step = step
        super().__init__(
            f"non-finite value in state {state} at interior cell {cell} during step {step}"
        )


class UnstableStepError(ClawtileError):
    """Two consecutive rejected steps with no improvement in the CFL number."""


class FrameFormatError(ClawtileError):
    """A frame file is structurally invalid (bad magic, version, or metadata)."""


class TruncatedFrameError(FrameFormatError):
    """A frame file ended before its declared payload was complete."""
