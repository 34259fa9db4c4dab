import numpy as np
import pytest

from clawtile.boundary import BoundaryKind, BoundarySpec, apply_boundary
from clawtile.errors import ConfigError
from clawtile.grid import create_grid

from helpers import make_spec


def coded_grid(cells, num_states=1):
    """Interior cell (x, y, ...) carries a unique decodable value."""
    grid = create_grid(make_spec(cells, num_states))
    interior = grid.interior()
    flat = np.arange(interior[0].size, dtype=np.float64).reshape(interior.shape[1:])
    for s in range(num_states):
        interior[s] = flat + 1000 * s
    return grid


class TestSpecValidation:
    def test_uniform(self):
        b = BoundarySpec.uniform(BoundaryKind.PERIODIC, (1, 2))
        assert b.sides == ((BoundaryKind.PERIODIC,) * 2,) * 2
        assert b.is_periodic(0) and b.is_periodic(1)

    def test_periodic_must_pair(self):
        with pytest.raises(ConfigError):
            BoundarySpec(
                sides=((BoundaryKind.PERIODIC, BoundaryKind.OUTFLOW),),
                normal_velocity=(None,),
            )

    def test_reflective_needs_velocity_index(self):
        with pytest.raises(ConfigError):
            BoundarySpec(
                sides=((BoundaryKind.REFLECTIVE, BoundaryKind.REFLECTIVE),),
                normal_velocity=(None,),
            )

    def test_mixed_sides_allowed(self):
        b = BoundarySpec(
            sides=(
                (BoundaryKind.OUTFLOW, BoundaryKind.REFLECTIVE),
                (BoundaryKind.PERIODIC, BoundaryKind.PERIODIC),
            ),
            normal_velocity=(1, 2),
        )
        assert not b.is_periodic(0)
        assert b.is_periodic(1)


class TestPeriodic:
    def test_full_wrap_matches_torus(self):
        grid = coded_grid((4, 3), num_states=2)
        interior = grid.interior().copy()
        apply_boundary(grid, BoundarySpec.uniform(BoundaryKind.PERIODIC, (None, None)))
        ny, nx = interior.shape[1:]
        for s in range(2):
            for y in range(ny + 4):
                for x in range(nx + 4):
                    expected = interior[s, (y - 2) % ny, (x - 2) % nx]
                    assert grid.data[s, y, x] == expected, (s, y, x)

    def test_1d_wrap(self):
        grid = coded_grid((5,))
        apply_boundary(grid, BoundarySpec.uniform(BoundaryKind.PERIODIC, (None,)))
        row = grid.data[0]
        np.testing.assert_array_equal(row[:2], row[5:7])
        np.testing.assert_array_equal(row[7:], row[2:4])

    def test_3d_wrap_along_z(self):
        grid = coded_grid((3, 3, 3))
        apply_boundary(
            grid, BoundarySpec.uniform(BoundaryKind.PERIODIC, (None, None, None))
        )
        data = grid.data[0]  # array order (z, y, x)
        np.testing.assert_array_equal(data[0, 2:-2, 2:-2], data[3, 2:-2, 2:-2])
        np.testing.assert_array_equal(data[1, 2:-2, 2:-2], data[4, 2:-2, 2:-2])
        np.testing.assert_array_equal(data[5, 2:-2, 2:-2], data[2, 2:-2, 2:-2])
        np.testing.assert_array_equal(data[6, 2:-2, 2:-2], data[3, 2:-2, 2:-2])


class TestOutflow:
    def test_copies_edge_slab(self):
        grid = coded_grid((4, 3))
        apply_boundary(grid, BoundarySpec.uniform(BoundaryKind.OUTFLOW, (None, None)))
        data = grid.data[0]
        np.testing.assert_array_equal(data[:, 0], data[:, 2])
        np.testing.assert_array_equal(data[:, 1], data[:, 2])
        np.testing.assert_array_equal(data[:, -1], data[:, -3])
        np.testing.assert_array_equal(data[0, :], data[2, :])
        np.testing.assert_array_equal(data[-2, :], data[-3, :])


class TestReflective:
    def test_mirrors_and_negates_normal_velocity(self):
        grid = create_grid(make_spec((4, 3), 3))
        interior = grid.interior()
        rng = np.random.default_rng(5)
        interior[...] = rng.standard_normal(interior.shape)
        snap = interior.copy()
        apply_boundary(
            grid, BoundarySpec.uniform(BoundaryKind.REFLECTIVE, (1, 2))
        )
        data = grid.data
        # left x face: ghost column 1 mirrors interior column 2, etc.
        np.testing.assert_array_equal(data[0, 2:-2, 1], snap[0, :, 0])
        np.testing.assert_array_equal(data[0, 2:-2, 0], snap[0, :, 1])
        np.testing.assert_array_equal(data[1, 2:-2, 1], -snap[1, :, 0])
        np.testing.assert_array_equal(data[1, 2:-2, 0], -snap[1, :, 1])
        np.testing.assert_array_equal(data[2, 2:-2, 1], snap[2, :, 0])  # transverse kept
        # top y face mirrors rows and negates the y velocity only
        np.testing.assert_array_equal(data[2, -2, 2:-2], -snap[2, -1, :])
        np.testing.assert_array_equal(data[1, -2, 2:-2], snap[1, -1, :])

    def test_wall_keeps_still_water_still(self):
        # lake at rest next to a wall must see zero velocity gradient
        grid = create_grid(make_spec((4,), 2))
        grid.interior(0)[...] = 3.0
        grid.interior(1)[...] = 0.0
        apply_boundary(grid, BoundarySpec.uniform(BoundaryKind.REFLECTIVE, (1,)))
        np.testing.assert_array_equal(grid.data[0], 3.0 * np.ones(8))
        np.testing.assert_array_equal(grid.data[1], np.zeros(8))


class TestInteriorUntouched:
    @pytest.mark.parametrize("kind", list(BoundaryKind))
    def test_fill_never_writes_interior(self, kind):
        nv = (1, 2) if kind is BoundaryKind.REFLECTIVE else (None, None)
        grid = coded_grid((4, 3), num_states=3)
        before = grid.interior().copy()
        apply_boundary(grid, BoundarySpec.uniform(kind, nv))
        np.testing.assert_array_equal(grid.interior(), before)
