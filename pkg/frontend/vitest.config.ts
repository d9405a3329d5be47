import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    globalSetup: ["./test/global_setup.ts"],
    include: ["test/**/*.test.ts"],
    testTimeout: 20000,
    hookTimeout: 60000,
  },
});
