import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { get } from "node:http";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

const REPO = resolve(dirname(fileURLToPath(import.meta.url)), "..", "..");

export interface TestServer {
  base: string;
  stop(): void;
}

function cli(store: string, ...argv: string[]): void {
  const run = spawnSync(
    "python3",
    ["-m", "drilltutor", ...argv, "--store", store],
    { encoding: "utf-8" },
  );
  if (run.status !== 0) {
    throw new Error(`drilltutor ${argv[0]} failed: ${run.stderr}`);
  }
}

function probe(url: string): Promise<boolean> {
  return new Promise((ok) => {
    const req = get(url, (res) => {
      res.resume();
      ok(res.statusCode === 200);
    });
    req.on("error", () => ok(false));
  });
}

async function waitHealthy(base: string, proc: ChildProcess): Promise<void> {
  const deadline = Date.now() + 30000;
  while (Date.now() < deadline) {
    if (proc.exitCode !== null) {
      throw new Error(`server exited early with code ${proc.exitCode}`);
    }
    if (await probe(`${base}/health`)) return;
    await new Promise((tick) => setTimeout(tick, 150));
  }
  throw new Error("server never became healthy");
}

/**
 * Seed a throwaway store with the starter content plus one expert
 * account and serve it on the port the test document claims as its
 * origin, so requests and cookies behave exactly as deployed.
 */
export async function startServer(): Promise<TestServer> {
  const port = Number(process.env.DRILL_TEST_PORT);
  if (!port) throw new Error("DRILL_TEST_PORT is not set; run through vitest");

  const work = mkdtempSync(join(tmpdir(), "dt-webui-"));
  const store = join(work, "tutor.db");
  cli(store, "import", join(REPO, "fixtures", "starter_bundle.json"));
  cli(store, "add-expert", "ama", "--password", "correct horse");

  const proc = spawn(
    "python3",
    ["-m", "drilltutor", "serve", "--store", store, "--port", String(port)],
    { stdio: ["ignore", "ignore", "pipe"] },
  );
  let stderr = "";
  proc.stderr?.on("data", (chunk) => {
    stderr += String(chunk);
  });

  const base = `http://127.0.0.1:${port}/api/v1`;
  try {
    await waitHealthy(base, proc);
  } catch (err) {
    proc.kill();
    rmSync(work, { recursive: true, force: true });
    throw new Error(`${err}\n${stderr}`);
  }

  return {
    base,
    stop() {
      proc.kill();
      rmSync(work, { recursive: true, force: true });
    },
  };
}
