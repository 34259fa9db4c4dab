import struct

import numpy as np
import pytest

from clawtile.errors import FrameFormatError, TruncatedFrameError
from clawtile.frames import (
    MAGIC,
    append_manifest,
    frame_bytes,
    frame_filename,
    load_into,
    parse_frame,
    read_frame,
    read_manifest,
    write_frame,
)
from clawtile.grid import create_grid

from helpers import make_spec


def random_grid(cells, m, dtype=np.float64, seed=1):
    grid = create_grid(make_spec(cells, m), dtype)
    rng = np.random.default_rng(seed)
    grid.interior()[...] = rng.standard_normal(grid.interior().shape)
    return grid


class TestLayout:
    def test_payload_length_4x4x3_double(self):
        grid = random_grid((4, 4), 3)
        blob = frame_bytes(grid, 0.0, 0)
        header_len = struct.calcsize("<8sII") + struct.calcsize("<2IIIdQ")
        assert len(blob) - header_len == 4 * 4 * 3 * 8 == 384

    def test_header_fields_bit_exact(self):
        grid = random_grid((6, 3), 2, np.float32)
        blob = frame_bytes(grid, 0.125, 77)
        magic, version, ndim = struct.unpack_from("<8sII", blob, 0)
        assert magic == MAGIC == b"CLAWFRM1"
        assert version == 1 and ndim == 2
        nx, ny, m, prec, t, step = struct.unpack_from("<2IIIdQ", blob, 16)
        assert (nx, ny) == (6, 3)  # x first
        assert m == 2 and prec == 4
        assert t == 0.125 and step == 77

    def test_payload_is_x_fastest(self):
        grid = random_grid((5, 4), 1)
        blob = frame_bytes(grid, 0.0, 0)
        start = struct.calcsize("<8sII") + struct.calcsize("<2IIIdQ")
        payload = np.frombuffer(blob, dtype="<f8", offset=start)
        interior = grid.interior(0)
        # first 5 values walk along x with y fixed at the first row
        np.testing.assert_array_equal(payload[:5], interior[0, :])
        np.testing.assert_array_equal(payload[5:10], interior[1, :])

    def test_states_stored_in_order(self):
        grid = random_grid((3, 3), 2)
        blob = frame_bytes(grid, 0.0, 0)
        frame = parse_frame(blob)
        np.testing.assert_array_equal(frame.states[0], grid.interior(0))
        np.testing.assert_array_equal(frame.states[1], grid.interior(1))


class TestRoundTrip:
    @pytest.mark.parametrize("cells", [(8,), (5, 4), (3, 4, 5)])
    @pytest.mark.parametrize("dtype", [np.float64, np.float32])
    def test_bitwise(self, cells, dtype, tmp_path):
        grid = random_grid(cells, 3, dtype)
        path = str(tmp_path / "f.clw")
        write_frame(path, grid, time=0.3, step=12)
        frame = read_frame(path)
        assert frame.time == 0.3 and frame.step == 12
        assert frame.header.dims == tuple(cells)
        assert frame.header.itemsize == np.dtype(dtype).itemsize
        for s in range(3):
            assert frame.states[s].tobytes() == grid.interior(s).tobytes()

    def test_ghost_cells_not_written(self, tmp_path):
        grid = random_grid((4, 4), 1)
        grid.data[0, 0, :] = 1e9  # poison a ghost row
        path = str(tmp_path / "f.clw")
        write_frame(path, grid, 0.0, 0)
        frame = read_frame(path)
        assert np.abs(frame.states[0]).max() < 1e3

    def test_load_into_round_trip(self, tmp_path):
        grid = random_grid((6, 5), 3)
        blob = frame_bytes(grid, 1.5, 3)
        target = create_grid(grid.spec)
        load_into(target, parse_frame(blob))
        assert target.interior().tobytes() == grid.interior().tobytes()
        assert not target.data[:, :2, :].any()  # ghosts stay zero


class TestParseErrors:
    def _blob(self):
        return frame_bytes(random_grid((4, 4), 2), 0.5, 9)

    def test_bad_magic(self):
        blob = b"NOTAFRM1" + self._blob()[8:]
        with pytest.raises(FrameFormatError, match="magic"):
            parse_frame(blob)

    def test_bad_version(self):
        blob = bytearray(self._blob())
        blob[8:12] = struct.pack("<I", 9)
        with pytest.raises(FrameFormatError, match="version"):
            parse_frame(bytes(blob))

    def test_bad_ndim(self):
        blob = bytearray(self._blob())
        blob[12:16] = struct.pack("<I", 7)
        with pytest.raises(FrameFormatError, match="ndim"):
            parse_frame(bytes(blob))

    def test_bad_precision(self):
        blob = bytearray(self._blob())
        # precision flag sits after dims and num_states
        off = 16 + 2 * 4 + 4
        blob[off:off + 4] = struct.pack("<I", 2)
        with pytest.raises(FrameFormatError, match="precision"):
            parse_frame(bytes(blob))

    @pytest.mark.parametrize("keep", [0, 4, 15, 17, 40, 100])
    def test_truncation_at_any_point(self, keep):
        with pytest.raises(TruncatedFrameError):
            parse_frame(self._blob()[:keep])

    def test_trailing_garbage(self):
        with pytest.raises(FrameFormatError, match="trailing"):
            parse_frame(self._blob() + b"x")

    def test_empty_dims(self):
        blob = bytearray(self._blob())
        blob[16:20] = struct.pack("<I", 0)
        with pytest.raises(FrameFormatError):
            parse_frame(bytes(blob))


class TestLoadIntoErrors:
    def test_dims_mismatch(self):
        blob = frame_bytes(random_grid((4, 4), 2), 0.0, 0)
        with pytest.raises(FrameFormatError, match="does not match grid"):
            load_into(create_grid(make_spec((4, 5), 2)), parse_frame(blob))

    def test_state_count_mismatch(self):
        blob = frame_bytes(random_grid((4, 4), 2), 0.0, 0)
        with pytest.raises(FrameFormatError):
            load_into(create_grid(make_spec((4, 4), 3)), parse_frame(blob))

    def test_precision_mismatch(self):
        blob = frame_bytes(random_grid((4, 4), 2), 0.0, 0)
        with pytest.raises(FrameFormatError, match="precision"):
            load_into(create_grid(make_spec((4, 4), 2), np.float32), parse_frame(blob))


class TestNamingAndManifest:
    def test_frame_filename(self):
        assert frame_filename(0) == "frame_0000.clw"
        assert frame_filename(42) == "frame_0042.clw"
        assert frame_filename(12345) == "frame_12345.clw"

    def test_manifest_round_trip(self, tmp_path):
        d = str(tmp_path)
        append_manifest(d, 0, 0.0, 0)
        append_manifest(d, 1, 0.25, 13)
        entries = read_manifest(d)
        assert entries == [
            {"index": 0, "time": 0.0, "step": 0, "file": "frame_0000.clw"},
            {"index": 1, "time": 0.25, "step": 13, "file": "frame_0001.clw"},
        ]

    def test_manifest_preserves_float_exactly(self, tmp_path):
        d = str(tmp_path)
        t = 0.1 + 0.2  # not representable prettily
        append_manifest(d, 0, t, 1)
        assert read_manifest(d)[0]["time"] == t

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(FrameFormatError, match="manifest"):
            read_manifest(str(tmp_path))
