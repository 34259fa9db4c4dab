"""Run configuration: INI-style text parsed into a validated RunConfig.

The format is plain ``key = value`` under ``[section]`` headers, read with
the standard library parser.  Validation is strict: unknown sections,
unknown keys, malformed values and inconsistent combinations all raise
:class:`ConfigError` naming the offender, so typos fail fast instead of
silently running with defaults.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, replace

from .boundary import BoundaryKind
from .errors import ConfigError
from .grid import DTYPES, GridSpec
from .limiter import LimiterKind
from .perf import MachineModel
from .problems import Problem, get_problem

_DEFAULT_TILES = {1: (1024,), 2: (64, 4), 3: (64, 4, 4)}

_KNOWN_SECTIONS = ("run", "grid", "physics", "scheme", "boundary",
                   "parallel", "initial", "machine")

_SECTION_KEYS = {
    "run": {"problem", "t_end", "frames", "counters", "precision", "dt_cap"},
    "grid": {"cells", "lower", "upper"},
    "scheme": {"limiter", "cfl_target", "cfl_max"},
    "boundary": {"all", "x", "y", "z"},
    "parallel": {"tiles", "workers", "serial"},
    "machine": {"peak_flops", "peak_bandwidth", "special_function_peak"},
    # [physics] and [initial] carry problem-defined keys, checked later
}


@dataclass(frozen=True)
class RunConfig:
    """Fully validated run description."""

    problem: str
    t_end: float
    num_frames: int
    counters: bool
    precision: str
    dt_cap: float
    cells: tuple[int, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    physics: dict
    limiter: LimiterKind
    cfl_target: float
    cfl_max: float
    boundary_sides: tuple[tuple[BoundaryKind, BoundaryKind], ...]
    tiles: tuple[int, ...]
    workers: int
    serial: bool
    initial_profile: str
    initial_options: dict
    machine: MachineModel | None = None

    @property
    def problem_def(self) -> Problem:
        return get_problem(self.problem)

    def frame_times(self) -> tuple[float, ...]:
        if self.num_frames <= 0:
            return ()
        return tuple(
            self.t_end * (i + 1) / self.num_frames for i in range(self.num_frames)
        )

    def effective_tiles(self) -> tuple[int, ...]:
        return self.cells if self.serial else self.tiles

    def effective_workers(self) -> int:
        return 1 if self.serial else self.workers

    def with_overrides(
        self,
        *,
        workers: int | None = None,
        tiles: tuple[int, ...] | None = None,
        serial: bool | None = None,
        precision: str | None = None,
        counters: bool | None = None,
        cells: tuple[int, ...] | None = None,
        limiter: LimiterKind | None = None,
        t_end: float | None = None,
        num_frames: int | None = None,
    ) -> "RunConfig":
        """Apply command-line style overrides and re-validate."""
        cfg = self
        updates = {}
        if workers is not None:
            updates["workers"] = workers
        if tiles is not None:
            updates["tiles"] = tiles
        if serial is not None:
            updates["serial"] = serial
        if precision is not None:
            updates["precision"] = precision
        if counters is not None:
            updates["counters"] = counters
        if cells is not None:
            updates["cells"] = cells
            # rescale is the caller's business; keep bounds as configured
        if limiter is not None:
            updates["limiter"] = limiter
        if t_end is not None:
            updates["t_end"] = t_end
        if num_frames is not None:
            updates["num_frames"] = num_frames
        cfg = replace(cfg, **updates)
        _validate(cfg)
        return cfg


def _parse_float(section: str, key: str, raw: str) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: {raw!r} is not a number", key=key) from None
    if math.isnan(v):
        raise ConfigError(f"[{section}] {key}: NaN is not allowed", key=key)
    return v


def _parse_int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: {raw!r} is not an integer", key=key) from None


def _parse_bool(section: str, key: str, raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"[{section}] {key}: {raw!r} is not a boolean", key=key)


def _parse_floats(section: str, key: str, raw: str) -> tuple[float, ...]:
    return tuple(_parse_float(section, key, tok) for tok in raw.split())


def _parse_ints(section: str, key: str, raw: str) -> tuple[int, ...]:
    return tuple(_parse_int(section, key, tok) for tok in raw.split())


def parse_tiles(raw: str) -> tuple[int, ...]:
    """Tile shape syntax: extents joined by 'x', e.g. ``64x4`` or ``32x8x8``."""
    try:
        shape = tuple(int(tok) for tok in raw.lower().split("x"))
    except ValueError:
        raise ConfigError(f"bad tile shape {raw!r}; expected e.g. 64x4") from None
    if not shape or any(w < 1 for w in shape):
        raise ConfigError(f"bad tile shape {raw!r}; extents must be positive")
    return shape


def _parse_kind_pair(section: str, key: str, raw: str) -> tuple[BoundaryKind, BoundaryKind]:
    toks = raw.split()
    if len(toks) == 1:
        k = BoundaryKind.from_name(toks[0])
        return (k, k)
    if len(toks) == 2:
        return (BoundaryKind.from_name(toks[0]), BoundaryKind.from_name(toks[1]))
    raise ConfigError(
        f"[{section}] {key}: give one kind for both sides or 'low high'", key=key
    )


def loads(text: str) -> RunConfig:
    """Parse config text into a validated :class:`RunConfig`."""
    parser = configparser.ConfigParser(
        strict=True,
        inline_comment_prefixes=("#", ";"),
        interpolation=None,
    )
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("config must start with a [section] header", line=exc.lineno) from exc
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError(f"malformed config line: {exc.message.splitlines()[0]}", line=line) from exc
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r} in [{exc.section}]", line=exc.lineno) from exc
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section [{exc.section}]", line=exc.lineno) from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    for section in parser.sections():
        if section not in _KNOWN_SECTIONS:
            raise ConfigError(
                f"unknown section [{section}]; expected one of: "
                + ", ".join(_KNOWN_SECTIONS)
            )
        keys = _SECTION_KEYS.get(section)
        if keys is not None:
            for key in parser[section]:
                if key not in keys:
                    raise ConfigError(
                        f"unknown key {key!r} in [{section}]; "
                        f"expected one of: {', '.join(sorted(keys))}",
                        key=key,
                    )

    def get(section, key, default=None):
        if parser.has_section(section) and key in parser[section]:
            return parser[section][key]
        return default

    if not parser.has_section("run") or "problem" not in parser["run"]:
        raise ConfigError("missing required key 'problem' in [run]")
    problem_name = get("run", "problem").strip()
    problem = get_problem(problem_name)
    nd = problem.ndim

    raw_t_end = get("run", "t_end")
    if raw_t_end is None:
        raise ConfigError("missing required key 't_end' in [run]")
    t_end = _parse_float("run", "t_end", raw_t_end)

    raw_cells = get("grid", "cells")
    if raw_cells is None:
        raise ConfigError("missing required key 'cells' in [grid]")
    cells = _parse_ints("grid", "cells", raw_cells)

    lower = _parse_floats("grid", "lower", get("grid", "lower", " ".join(["0"] * nd)))
    upper = _parse_floats("grid", "upper", get("grid", "upper", " ".join(["1"] * nd)))

    physics = {}
    if parser.has_section("physics"):
        for key, raw in parser["physics"].items():
            physics[key] = _parse_float("physics", key, raw)

    limiter_raw = get("scheme", "limiter", "mc")
    try:
        limiter = LimiterKind.from_name(limiter_raw)
    except ValueError as exc:
        raise ConfigError(str(exc), key="limiter") from None
    cfl_target = _parse_float("scheme", "cfl_target", get("scheme", "cfl_target", "0.9"))
    cfl_max = _parse_float("scheme", "cfl_max", get("scheme", "cfl_max", "1.0"))

    axis_names = ("x", "y", "z")[:nd]
    default_pair = _parse_kind_pair("boundary", "all", get("boundary", "all", "outflow"))
    sides = []
    for axis, name in enumerate(axis_names):
        raw = get("boundary", name)
        sides.append(default_pair if raw is None else _parse_kind_pair("boundary", name, raw))
    if parser.has_section("boundary"):
        for key in parser["boundary"]:
            if key != "all" and key not in axis_names:
                raise ConfigError(
                    f"boundary axis {key!r} does not exist for {problem_name}", key=key
                )

    raw_tiles = get("parallel", "tiles")
    tiles = parse_tiles(raw_tiles) if raw_tiles is not None else _DEFAULT_TILES[nd]
    workers = _parse_int("parallel", "workers", get("parallel", "workers", "1"))
    serial = _parse_bool("parallel", "serial", get("parallel", "serial", "false"))

    if not parser.has_section("initial") or "profile" not in parser["initial"]:
        raise ConfigError("missing required key 'profile' in [initial]")
    initial_profile = parser["initial"]["profile"].strip()
    initial_options = {}
    for key, raw in parser["initial"].items():
        if key == "profile":
            continue
        vals = _parse_floats("initial", key, raw)
        initial_options[key] = vals[0] if len(vals) == 1 else vals

    machine = None
    if parser.has_section("machine"):
        pf = get("machine", "peak_flops")
        bw = get("machine", "peak_bandwidth")
        if pf is None or bw is None:
            raise ConfigError("[machine] needs both peak_flops and peak_bandwidth")
        sfp = get("machine", "special_function_peak")
        try:
            machine = MachineModel(
                peak_flops=_parse_float("machine", "peak_flops", pf),
                peak_bandwidth=_parse_float("machine", "peak_bandwidth", bw),
                special_function_peak=(
                    None if sfp is None
                    else _parse_float("machine", "special_function_peak", sfp)
                ),
            )
        except ValueError as exc:
            raise ConfigError(f"invalid machine model: {exc}") from exc

    cfg = RunConfig(
        problem=problem_name,
        t_end=t_end,
        num_frames=_parse_int("run", "frames", get("run", "frames", "0")),
        counters=_parse_bool("run", "counters", get("run", "counters", "false")),
        precision=get("run", "precision", "double").strip().lower(),
        dt_cap=_parse_float("run", "dt_cap", get("run", "dt_cap", "inf")),
        cells=cells,
        lower=lower,
        upper=upper,
        physics=physics,
        limiter=limiter,
        cfl_target=cfl_target,
        cfl_max=cfl_max,
        boundary_sides=tuple(sides),
        tiles=tiles,
        workers=workers,
        serial=serial,
        initial_profile=initial_profile,
        initial_options=initial_options,
        machine=machine,
    )
    _validate(cfg)
    return cfg


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from exc
    return loads(text)


def _validate(cfg: RunConfig) -> None:
    problem = cfg.problem_def
    nd = problem.ndim
    if len(cfg.cells) != nd:
        raise ConfigError(
            f"problem {cfg.problem!r} is {nd}-D but cells has "
            f"{len(cfg.cells)} entries"
        )
    if any(c < 1 for c in cfg.cells):
        raise ConfigError(f"cell counts must be positive, got {cfg.cells}")
    if len(cfg.lower) != nd or len(cfg.upper) != nd:
        raise ConfigError(f"lower/upper need {nd} entries each")
    if any(u <= l for l, u in zip(cfg.lower, cfg.upper)):
        raise ConfigError("upper must exceed lower on every axis")
    if cfg.t_end <= 0.0:
        raise ConfigError("t_end must be positive")
    if cfg.num_frames < 0:
        raise ConfigError("frames must be non-negative")
    if cfg.precision not in DTYPES:
        raise ConfigError(
            f"precision must be one of: {', '.join(DTYPES)}; got {cfg.precision!r}"
        )
    if cfg.dt_cap <= 0.0:
        raise ConfigError("dt_cap must be positive")
    if not 0.0 < cfg.cfl_target <= cfg.cfl_max <= 1.0:
        raise ConfigError(
            f"need 0 < cfl_target <= cfl_max <= 1, got "
            f"{cfg.cfl_target} and {cfg.cfl_max}"
        )
    if len(cfg.tiles) != nd:
        raise ConfigError(
            f"tile shape {cfg.tiles} has {len(cfg.tiles)} axes, problem is {nd}-D"
        )
    if any(w < 1 for w in cfg.tiles):
        raise ConfigError("tile extents must be positive")
    if cfg.workers < 1:
        raise ConfigError("workers must be at least 1")
    # these raise ConfigError themselves on bad keys/values
    problem.make_params(cfg.physics)
    try:
        spec = GridSpec(cells=cfg.cells, lower=cfg.lower, upper=cfg.upper,
                        num_states=problem.num_states)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    problem.initial_profile(cfg.initial_profile, cfg.initial_options, spec)
    for axis, (lo, hi) in enumerate(cfg.boundary_sides):
        for kind in (lo, hi):
            if kind is BoundaryKind.REFLECTIVE and problem.normal_velocity[axis] is None:
                raise ConfigError(
                    f"reflective boundary on axis {axis} is not available for "
                    f"{cfg.problem!r} (no velocity state on that axis)"
                )
