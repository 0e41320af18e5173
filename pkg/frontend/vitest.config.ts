import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    globalSetup: ["./tests/global-setup.ts"],
    reporters: "verbose",
    // one shared service process; run files sequentially so its event logs
    // stay readable and the single-core sandbox is not oversubscribed
    fileParallelism: false,
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
