import { defineConfig } from "vitest/config";

export default defineConfig({
  build: { outDir: "dist", sourcemap: true },
  server: {
    // dev server only; the production bundle is served by the API process
    proxy: { "/api": "http://127.0.0.1:8472" },
  },
  test: {
    environment: "jsdom",
    include: ["test/**/*.test.ts"],
    testTimeout: 30000,
  },
});
