"""Binary frame files: snapshots of the interior solution.

Layout, all little-endian, no padding:

    magic      8 bytes  b"CLAWFRM1"
    version    u32      currently 1
    ndim       u32
    dims       u32 * ndim   interior cells per axis, x first
    num_states u32
    precision  u32      bytes per value: 4 or 8
    time       f64
    step       u64

followed by one interior payload per state variable, row-major with x
fastest, ghost cells excluded.  File length is fully determined by the
header; anything shorter is reported as truncation, anything longer as
corruption.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import FrameFormatError, TruncatedFrameError
from .grid import StateGrid

MAGIC = b"CLAWFRM1"
VERSION = 1

_PREFIX = struct.Struct("<8sII")  # magic, version, ndim

MANIFEST_NAME = "manifest.tsv"


@dataclass(frozen=True)
class FrameHeader:
    ndim: int
    dims: tuple[int, ...]  # logical order, x first
    num_states: int
    itemsize: int
    time: float
    step: int

    @property
    def payload_bytes(self) -> int:
        n = self.num_states * self.itemsize
        for d in self.dims:
            n *= d
        return n

    @property
    def dtype(self) -> np.dtype:
        return np.dtype("<f4" if self.itemsize == 4 else "<f8")


@dataclass(frozen=True)
class Frame:
    header: FrameHeader
    states: tuple[np.ndarray, ...]  # interior arrays, array (x-last) order

    @property
    def time(self) -> float:
        return self.header.time

    @property
    def step(self) -> int:
        return self.header.step


def _header_struct(ndim: int) -> struct.Struct:
    return struct.Struct(f"<{ndim}IIIdQ")


def frame_header_bytes(header: FrameHeader) -> bytes:
    return _PREFIX.pack(MAGIC, VERSION, header.ndim) + _header_struct(header.ndim).pack(
        *header.dims, header.num_states, header.itemsize, header.time, header.step
    )


def frame_bytes(grid: StateGrid, time: float, step: int) -> bytes:
    """Serialize the grid's interior as one frame."""
    spec = grid.spec
    header = FrameHeader(
        ndim=spec.ndim,
        dims=spec.cells,
        num_states=spec.num_states,
        itemsize=grid.dtype.itemsize,
        time=float(time),
        step=int(step),
    )
    parts = [frame_header_bytes(header)]
    le = header.dtype
    for s in range(spec.num_states):
        parts.append(np.ascontiguousarray(grid.interior(s)).astype(le, copy=False).tobytes())
    return b"".join(parts)


def write_frame(path: str, grid: StateGrid, time: float, step: int) -> None:
    with open(path, "wb") as fh:
        fh.write(frame_bytes(grid, time, step))


def parse_frame(data: bytes) -> Frame:
    """Decode one frame from bytes, validating structure exhaustively."""
    if len(data) < _PREFIX.size:
        raise TruncatedFrameError(
            f"file ends inside the fixed header ({len(data)} bytes)"
        )
    magic, version, ndim = _PREFIX.unpack_from(data, 0)
    if magic != MAGIC:
        raise FrameFormatError(f"bad magic {magic!r}; not a frame file")
    if version != VERSION:
        raise FrameFormatError(f"unsupported frame version {version}")
    if not 1 <= ndim <= 3:
        raise FrameFormatError(f"frame declares unsupported ndim {ndim}")
    var = _header_struct(ndim)
    if len(data) < _PREFIX.size + var.size:
        raise TruncatedFrameError("file ends inside the dimension header")
    fields = var.unpack_from(data, _PREFIX.size)
    dims = tuple(int(d) for d in fields[:ndim])
    num_states = int(fields[ndim])
    itemsize = int(fields[ndim + 1])
    time = float(fields[ndim + 2])
    step = int(fields[ndim + 3])
    if any(d < 1 for d in dims):
        raise FrameFormatError(f"frame declares empty dims {dims}")
    if num_states < 1:
        raise FrameFormatError("frame declares zero states")
    if itemsize not in (4, 8):
        raise FrameFormatError(f"frame precision {itemsize} is not 4 or 8 bytes")
    header = FrameHeader(ndim, dims, num_states, itemsize, time, step)
    off = _PREFIX.size + var.size
    expect = off + header.payload_bytes
    if len(data) < expect:
        raise TruncatedFrameError(
            f"payload truncated: have {len(data) - off} of "
            f"{header.payload_bytes} bytes"
        )
    if len(data) > expect:
        raise FrameFormatError(
            f"{len(data) - expect} unexpected trailing bytes after payload"
        )
    shape = tuple(reversed(dims))
    per_state = header.payload_bytes // num_states
    states = []
    for s in range(num_states):
        arr = np.frombuffer(
            data, dtype=header.dtype, count=per_state // itemsize,
            offset=off + s * per_state,
        ).reshape(shape)
        states.append(arr)
    return Frame(header=header, states=tuple(states))


def read_frame(path: str) -> Frame:
    with open(path, "rb") as fh:
        return parse_frame(fh.read())


def load_into(grid: StateGrid, frame: Frame) -> None:
    """Copy a frame's payload into a grid's interior.

    The grid must match the frame exactly (dims, state count, precision);
    resampling is out of scope and a mismatch is an error.
    """
    spec = grid.spec
    h = frame.header
    if h.dims != spec.cells or h.num_states != spec.num_states:
        raise FrameFormatError(
            f"frame shape {h.dims}x{h.num_states} does not match grid "
            f"{spec.cells}x{spec.num_states}"
        )
    if h.itemsize != grid.dtype.itemsize:
        raise FrameFormatError(
            f"frame precision ({h.itemsize} bytes) does not match grid "
            f"({grid.dtype.itemsize} bytes)"
        )
    for s in range(spec.num_states):
        grid.interior(s)[...] = frame.states[s]


def frame_filename(index: int) -> str:
    return f"frame_{index:04d}.clw"


def append_manifest(directory: str, index: int, time: float, step: int) -> None:
    """Record one frame in the run manifest (tab-separated, append-only)."""
    path = os.path.join(directory, MANIFEST_NAME)
    new = not os.path.exists(path)
    with open(path, "a", encoding="utf-8") as fh:
        if new:
            fh.write("index\ttime\tstep\tfile\n")
        fh.write(f"{index}\t{time!r}\t{step}\t{frame_filename(index)}\n")


def read_manifest(directory: str) -> list[dict]:
    path = os.path.join(directory, MANIFEST_NAME)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise FrameFormatError(f"cannot read manifest: {exc.strerror}") from exc
    entries = []
    for line in lines[1:]:
        index, time, step, name = line.split("\t")
        entries.append(
            {"index": int(index), "time": float(time), "step": int(step), "file": name}
        )
    return entries
