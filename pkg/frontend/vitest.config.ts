import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    globalSetup: ["tests/setup/service.ts"],
    testTimeout: 120_000,
    hookTimeout: 120_000,
    // solver sessions live in one service process; keep files sequential
    // so timing-sensitive tests never fight over it
    fileParallelism: false,
  },
});
