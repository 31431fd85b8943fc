import { createServer } from "node:net";
import { defineConfig } from "vitest/config";

function reservePort(): Promise<number> {
  return new Promise((ok, fail) => {
    const probe = createServer();
    probe.once("error", fail);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        fail(new Error("no port assigned"));
        return;
      }
      const port = address.port;
      probe.close(() => ok(port));
    });
  });
}

// In production the page is served from the same origin as the API, so
// the test document lives at the origin the test server will bind.
export default defineConfig(async () => {
  const port = await reservePort();
  return {
    test: {
      environment: "happy-dom",
      environmentOptions: { happyDOM: { url: `http://127.0.0.1:${port}` } },
      env: { DRILL_TEST_PORT: String(port) },
      include: ["tests/**/*.test.ts"],
      testTimeout: 30000,
      hookTimeout: 60000,
    },
  };
});
