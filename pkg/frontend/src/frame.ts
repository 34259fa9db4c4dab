/**
 * Binary state-frame parser.
 *
 * Layout (all little-endian, no padding): 8-byte magic "CLAWFRM1",
 * u32 version, u32 ndim, ndim u32 cell counts (x first), u32 state
 * count, u32 item size (4 or 8), f64 simulation time, u64 step index,
 * then one contiguous x-fastest interior array per state variable.
 * Parsing copies out of the input buffer; the result owns its arrays.
 */

import { FrameFormatError } from "./errors.js";

const MAGIC = "CLAWFRM1";
const VERSION = 1;
const PREFIX_BYTES = 16; // magic + version + ndim

export interface FrameHeader {
  readonly version: number;
  readonly ndim: number;
  /** Interior cell counts, x first. */
  readonly dims: readonly number[];
  readonly numStates: number;
  /** Bytes per value: 4 (float32) or 8 (float64). */
  readonly itemsize: number;
  readonly time: number;
  readonly step: number;
}

export type StateArray = Float64Array | Float32Array;

export interface Frame {
  readonly header: FrameHeader;
  /** One flat x-fastest array per state variable. */
  readonly states: readonly StateArray[];
}

function headerBytes(ndim: number): number {
  return PREFIX_BYTES + 4 * ndim + 4 + 4 + 8 + 8;
}

export function parseFrame(data: Uint8Array | ArrayBuffer): Frame {
  const bytes = data instanceof Uint8Array ? data : new Uint8Array(data);
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);

  if (bytes.byteLength < PREFIX_BYTES) {
    throw new FrameFormatError(
      `payload ends inside the fixed header (${bytes.byteLength} bytes)`,
    );
  }
  let magic = "";
  for (let i = 0; i < 8; i++) magic += String.fromCharCode(bytes[i]!);
  if (magic !== MAGIC) {
    throw new FrameFormatError(`bad magic ${JSON.stringify(magic)}; not a frame`);
  }
  const version = view.getUint32(8, true);
  if (version !== VERSION) {
    throw new FrameFormatError(`unsupported frame version ${version}`);
  }
  const ndim = view.getUint32(12, true);
  if (ndim < 1 || ndim > 3) {
    throw new FrameFormatError(`frame declares unsupported ndim ${ndim}`);
  }
  if (bytes.byteLength < headerBytes(ndim)) {
    throw new FrameFormatError("payload ends inside the dimension header");
  }

  const dims: number[] = [];
  for (let d = 0; d < ndim; d++) dims.push(view.getUint32(PREFIX_BYTES + 4 * d, true));
  let off = PREFIX_BYTES + 4 * ndim;
  const numStates = view.getUint32(off, true);
  const itemsize = view.getUint32(off + 4, true);
  const time = view.getFloat64(off + 8, true);
  const stepBig = view.getBigUint64(off + 16, true);
  off += 24;

  if (dims.some((d) => d < 1)) {
    throw new FrameFormatError(`frame declares empty dims [${dims.join(", ")}]`);
  }
  if (numStates < 1) {
    throw new FrameFormatError("frame declares zero states");
  }
  if (itemsize !== 4 && itemsize !== 8) {
    throw new FrameFormatError(`frame precision ${itemsize} is not 4 or 8 bytes`);
  }
  if (stepBig > BigInt(Number.MAX_SAFE_INTEGER)) {
    throw new FrameFormatError(`step index ${stepBig} exceeds safe integer range`);
  }
  const step = Number(stepBig);

  const cellsPerState = dims.reduce((a, b) => a * b, 1);
  const payload = numStates * cellsPerState * itemsize;
  const have = bytes.byteLength - off;
  if (have < payload) {
    throw new FrameFormatError(`payload truncated: have ${have} of ${payload} bytes`);
  }
  if (have > payload) {
    throw new FrameFormatError(`${have - payload} unexpected trailing bytes after payload`);
  }

  const states: StateArray[] = [];
  for (let s = 0; s < numStates; s++) {
    const base = off + s * cellsPerState * itemsize;
    if (itemsize === 8) {
      const arr = new Float64Array(cellsPerState);
      for (let i = 0; i < cellsPerState; i++) arr[i] = view.getFloat64(base + 8 * i, true);
      states.push(arr);
    } else {
      const arr = new Float32Array(cellsPerState);
      for (let i = 0; i < cellsPerState; i++) arr[i] = view.getFloat32(base + 4 * i, true);
      states.push(arr);
    }
  }

  return {
    header: { version, ndim, dims, numStates, itemsize, time, step },
    states,
  };
}

/** Row-major index helper for the x-fastest flat state arrays. */
export function cellIndex(dims: readonly number[], coords: readonly number[]): number {
  if (coords.length !== dims.length) {
    throw new FrameFormatError(
      `coordinate has ${coords.length} axes, frame has ${dims.length}`,
    );
  }
  let index = 0;
  for (let d = dims.length - 1; d >= 0; d--) {
    const c = coords[d]!;
    const n = dims[d]!;
    if (c < 0 || c >= n) {
      throw new FrameFormatError(`coordinate ${c} out of range for axis ${d} (${n} cells)`);
    }
    index = index * n + c;
  }
  return index;
}
