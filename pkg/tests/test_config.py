import math

import pytest

from clawtile.boundary import BoundaryKind
from clawtile.config import RunConfig, load_config, loads, parse_tiles
from clawtile.errors import ConfigError
from clawtile.limiter import LimiterKind

MINIMAL = """\
[run]
problem = shallow_water2d
t_end = 0.5

[grid]
cells = 32 16

[initial]
profile = gaussian_hump
"""

FULL = """\
[run]
problem = acoustics2d
t_end = 1.0
frames = 4
counters = yes
precision = single
dt_cap = 0.25

[grid]
cells = 64 32
lower = -1.0 0.0
upper = 1.0 2.0

[physics]
sound_speed = 1.5
impedance = 0.8

[scheme]
limiter = superbee
cfl_target = 0.8
cfl_max = 0.95

[boundary]
all = periodic

[parallel]
tiles = 32x8
workers = 4

[initial]
profile = gaussian_pressure
amplitude = 0.2
width = 0.1

[machine]
peak_flops = 1e12
peak_bandwidth = 1.2e11
special_function_peak = 2e11
"""


class TestParsing:
    def test_minimal_defaults(self):
        cfg = loads(MINIMAL)
        assert cfg.problem == "shallow_water2d"
        assert cfg.cells == (32, 16)
        assert cfg.lower == (0.0, 0.0) and cfg.upper == (1.0, 1.0)
        assert cfg.limiter is LimiterKind.MC
        assert cfg.cfl_target == 0.9 and cfg.cfl_max == 1.0
        assert cfg.num_frames == 0 and not cfg.counters
        assert cfg.precision == "double"
        assert cfg.dt_cap == math.inf
        assert cfg.tiles == (64, 4)
        assert cfg.workers == 1 and not cfg.serial
        assert cfg.boundary_sides == ((BoundaryKind.OUTFLOW,) * 2,) * 2
        assert cfg.machine is None

    def test_full_round(self):
        cfg = loads(FULL)
        assert cfg.precision == "single"
        assert cfg.physics == {"sound_speed": 1.5, "impedance": 0.8}
        assert cfg.limiter is LimiterKind.SUPERBEE
        assert cfg.tiles == (32, 8) and cfg.workers == 4
        assert cfg.boundary_sides == ((BoundaryKind.PERIODIC,) * 2,) * 2
        assert cfg.initial_profile == "gaussian_pressure"
        assert cfg.initial_options == {"amplitude": 0.2, "width": 0.1}
        assert cfg.machine.peak_flops == 1e12
        assert cfg.machine.special_function_peak == 2e11

    def test_per_axis_boundaries(self):
        text = MINIMAL + "[boundary]\nx = periodic\ny = outflow reflective\n"
        cfg = loads(text)
        assert cfg.boundary_sides[0] == (BoundaryKind.PERIODIC, BoundaryKind.PERIODIC)
        assert cfg.boundary_sides[1] == (BoundaryKind.OUTFLOW, BoundaryKind.REFLECTIVE)

    def test_inline_comments(self):
        cfg = loads(MINIMAL.replace("t_end = 0.5", "t_end = 0.5  # half a second"))
        assert cfg.t_end == 0.5

    def test_load_from_file(self, tmp_path):
        p = tmp_path / "run.ini"
        p.write_text(MINIMAL)
        assert load_config(str(p)).problem == "shallow_water2d"

    def test_missing_file(self):
        with pytest.raises(ConfigError, match="cannot read config"):
            load_config("/nonexistent/run.ini")

    def test_frame_times(self):
        cfg = loads(MINIMAL.replace("t_end = 0.5", "t_end = 1.0") + "\n")
        cfg = cfg.with_overrides(num_frames=4)
        assert cfg.frame_times() == (0.25, 0.5, 0.75, 1.0)

    def test_effective_parallel_settings(self):
        cfg = loads(FULL)
        assert cfg.effective_tiles() == (32, 8)
        assert cfg.effective_workers() == 4
        serial = cfg.with_overrides(serial=True)
        assert serial.effective_tiles() == serial.cells
        assert serial.effective_workers() == 1


class TestParseTiles:
    def test_shapes(self):
        assert parse_tiles("64x4") == (64, 4)
        assert parse_tiles("32X8X8") == (32, 8, 8)
        assert parse_tiles("128") == (128,)

    def test_rejects_garbage(self):
        for bad in ("", "ax4", "0x4", "4x-2"):
            with pytest.raises(ConfigError):
                parse_tiles(bad)


class TestErrors:
    @pytest.mark.parametrize("mutate,fragment", [
        (lambda t: t.replace("[run]\n", ""), "section"),
        (lambda t: t.replace("problem = shallow_water2d\n", ""), "problem"),
        (lambda t: t.replace("t_end = 0.5\n", ""), "t_end"),
        (lambda t: t.replace("cells = 32 16\n", ""), "cells"),
        (lambda t: t.replace("profile = gaussian_hump\n", ""), "profile"),
        (lambda t: t.replace("shallow_water2d", "navier_stokes"), "unknown problem"),
        (lambda t: t.replace("t_end = 0.5", "t_end = soon"), "not a number"),
        (lambda t: t.replace("t_end = 0.5", "t_end = nan"), "NaN"),
        (lambda t: t.replace("t_end = 0.5", "t_end = -1"), "positive"),
        (lambda t: t.replace("cells = 32 16", "cells = 32"), "2-D"),
        (lambda t: t + "[grid2]\nx = 1\n", "unknown section"),
        (lambda t: t + "[scheme]\nlimiter = koren\n", "unknown limiter"),
        (lambda t: t + "[scheme]\ncfl_target = 1.5\n", "cfl"),
        (lambda t: t + "[run2]\n", "unknown section"),
        (lambda t: t + "[parallel]\ntiles = 4\n", "tile shape"),
        (lambda t: t + "[parallel]\nworkers = 0\n", "workers"),
        (lambda t: t + "[boundary]\nz = periodic\n", "does not exist"),
        (lambda t: t + "[physics]\nviscosity = 1\n", "unknown physics key"),
        (lambda t: t + "splash = 3\n", "unknown initial-profile option"),
        (lambda t: t.replace("gaussian_hump", "volcano"), "unknown initial profile"),
        (lambda t: t + "[run]\n", "duplicate"),
        (lambda t: t + "[machine]\npeak_flops = 1e9\n", "peak_bandwidth"),
        (lambda t: t.replace("[grid]", "[grid]\nghost = 3"), "unknown key"),
    ])
    def test_rejections(self, mutate, fragment):
        with pytest.raises(ConfigError, match=fragment):
            loads(mutate(MINIMAL))

    def test_unknown_run_key_names_the_key(self):
        with pytest.raises(ConfigError) as exc:
            loads(MINIMAL + "[scheme]\nflux = roe\n")
        assert exc.value.key == "flux"

    def test_reflective_without_velocity_state(self):
        text = """\
[run]
problem = advection1d
t_end = 0.5
[grid]
cells = 32
[initial]
profile = sine
[boundary]
all = reflective
"""
        with pytest.raises(ConfigError, match="reflective"):
            loads(text)

    def test_headerless_text_reports_line(self):
        with pytest.raises(ConfigError) as exc:
            loads("problem = x\n")
        assert exc.value.line == 1

    def test_precision_checked(self):
        with pytest.raises(ConfigError, match="precision"):
            loads(MINIMAL.replace("[run]", "[run]\nprecision = quad"))


class TestOverrides:
    def test_overrides_apply_and_revalidate(self):
        cfg = loads(MINIMAL)
        out = cfg.with_overrides(workers=8, tiles=(8, 8), precision="single",
                                 counters=True, t_end=2.0, limiter=LimiterKind.NONE)
        assert out.workers == 8 and out.tiles == (8, 8)
        assert out.precision == "single" and out.counters
        assert out.t_end == 2.0 and out.limiter is LimiterKind.NONE
        assert cfg.workers == 1  # original untouched

    def test_bad_override_rejected(self):
        cfg = loads(MINIMAL)
        with pytest.raises(ConfigError):
            cfg.with_overrides(workers=0)
        with pytest.raises(ConfigError):
            cfg.with_overrides(cells=(16,))
        with pytest.raises(ConfigError):
            cfg.with_overrides(precision="half")
