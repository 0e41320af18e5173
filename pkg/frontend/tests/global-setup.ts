// Boots one real service process (demo catalog, throwaway data dir) for the
// whole test run and hands its base URL to the tests.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import type { TestProject } from "vitest/node";

const REPO_ROOT = fileURLToPath(new URL("../..", import.meta.url));

async function waitForHealth(base: string, child: ChildProcess): Promise<void> {
  const deadline = Date.now() + 45_000;
  for (;;) {
    if (child.exitCode !== null) {
      throw new Error(`service process exited with code ${child.exitCode}`);
    }
    try {
      const response = await fetch(`${base}/healthz`);
      if (response.ok) return;
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) throw new Error(`service at ${base} never became healthy`);
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
}

export default async function setup(project: TestProject): Promise<() => Promise<void>> {
  const port = 21000 + Math.floor(Math.random() * 2000);
  const base = `http://127.0.0.1:${port}`;
  const dataDir = mkdtempSync(join(tmpdir(), "webui-sessions-"));
  const child = spawn(
    "python3",
    [
      "-m",
      "adaptive_curriculum.cli",
      "serve",
      "--catalog",
      "demo",
      "--host",
      "127.0.0.1",
      "--port",
      String(port),
      "--data-dir",
      dataDir,
    ],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );
  await waitForHealth(base, child);
  project.provide("baseUrl", base);
  return async () => {
    child.kill("SIGTERM");
    await new Promise((resolve) => setTimeout(resolve, 200));
    if (child.exitCode === null) child.kill("SIGKILL");
    rmSync(dataDir, { recursive: true, force: true });
  };
}
