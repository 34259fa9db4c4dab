import { describe, expect, it } from "vitest";

import { ValidationError, renderConfig } from "../src/index.js";

describe("renderConfig", () => {
  it("renders sections, scalars, arrays and booleans", () => {
    const text = renderConfig({
      run: { problem: "acoustics2d", t_end: 0.5, counters: true },
      grid: { cells: [64, 32], lower: [0, 0], upper: [2, 1] },
      boundary: { all: "periodic" },
      initial: { profile: "gaussian_pressure", amplitude: 0.25 },
    });
    expect(text).toBe(
      [
        "[run]",
        "problem = acoustics2d",
        "t_end = 0.5",
        "counters = true",
        "",
        "[grid]",
        "cells = 64 32",
        "lower = 0 0",
        "upper = 2 1",
        "",
        "[boundary]",
        "all = periodic",
        "",
        "[initial]",
        "profile = gaussian_pressure",
        "amplitude = 0.25",
        "",
      ].join("\n"),
    );
  });

  it("rejects malformed mappings before any network call", () => {
    expect(() => renderConfig({ "Bad Section": { a: 1 } })).toThrowError(
      ValidationError,
    );
    expect(() => renderConfig({ run: { "bad key": 1 } })).toThrowError(
      ValidationError,
    );
    expect(() => renderConfig({ run: { t_end: Number.NaN } })).toThrowError(
      ValidationError,
    );
    expect(() => renderConfig({ run: { t_end: Infinity } })).toThrowError(
      ValidationError,
    );
    expect(() =>
      renderConfig({ run: { problem: "a\nb" } }),
    ).toThrowError("newline");
    expect(() => renderConfig({ grid: { cells: [] as never } })).toThrowError(
      ValidationError,
    );
  });
});
