import { defineConfig } from "vitest/config";

// the round-trip suite spawns a real gateway process, so hooks and tests
// get generous timeouts
export default defineConfig({
  test: {
    environment: "node",
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
