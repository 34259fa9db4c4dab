/**
 * Binding fidelity: the client and the CLI drive the same engine, so
 * the state payload fetched over HTTP at t=0.1 must equal, bit for bit,
 * the frame file the CLI writes for the same config and time.
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, describe, expect, it } from "vitest";

import { ClawtileClient, parseFrame, renderConfig } from "../src/index.js";

const CONFIG = {
  run: { problem: "shallow_water2d", t_end: 0.1, frames: 1 },
  grid: { cells: [48, 32], lower: [0, 0], upper: [1.5, 1] },
  physics: { gravity: 1.0 },
  scheme: { limiter: "mc" },
  boundary: { all: "periodic" },
  initial: { profile: "gaussian_hump", amplitude: 0.4 },
};

const scratch = mkdtempSync(join(tmpdir(), "clawtile-fidelity-"));

afterAll(() => {
  rmSync(scratch, { recursive: true, force: true });
});

function runCli(configText: string): Uint8Array {
  const configPath = join(scratch, "run.cfg");
  const framesDir = join(scratch, "frames");
  writeFileSync(configPath, configText);
  const proc = spawnSync(
    "clawtile",
    ["run", "--config", configPath, "--frames", framesDir],
    { encoding: "utf-8", timeout: 300_000 },
  );
  expect(proc.error).toBeUndefined();
  expect(proc.status, proc.stderr).toBe(0);
  // frame 0 is the initial state; frame 1 is the scheduled output at t_end
  return new Uint8Array(readFileSync(join(framesDir, "frame_0001.clw")));
}

describe("binding fidelity", () => {
  it("HTTP state at t=0.1 is bitwise equal to the CLI frame", async () => {
    const baseUrl = process.env.CLAWTILE_TEST_BASE_URL;
    if (!baseUrl) throw new Error("service base URL missing; global setup failed");

    const configText = renderConfig(CONFIG);
    const cliFrame = runCli(configText);

    const client = new ClawtileClient({ baseUrl });
    const session = await client.createSession(configText);
    try {
      const report = await session.evolve(0.1);
      expect(report.time).toBe(0.1);
      const bindingFrame = await session.stateBytes();

      expect(bindingFrame.byteLength).toBe(cliFrame.byteLength);
      expect(Buffer.from(bindingFrame).equals(Buffer.from(cliFrame))).toBe(true);

      // and both parse to the same well-formed state
      const parsed = parseFrame(bindingFrame);
      expect(parsed.header.time).toBe(0.1);
      expect(parsed.header.dims).toEqual([48, 32]);
      expect(parsed.header.numStates).toBe(3);
      const reference = parseFrame(cliFrame);
      expect(parsed.header).toEqual(reference.header);
      for (let s = 0; s < parsed.states.length; s++) {
        expect(parsed.states[s]).toEqual(reference.states[s]);
      }
    } finally {
      await session.close();
    }
  });
});
