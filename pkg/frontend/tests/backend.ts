/** Spawns the real elicitation service (stub provider) for UI tests and tears
 * it down afterwards. Tests talk to it over plain HTTP on localhost. */

import { type ChildProcess, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface Backend {
  baseUrl: string;
  storeDir: string;
  stop(): Promise<void>;
}

const SERVER_SCRIPT = `
import sys
from privacy_elicit.service import ServiceConfig, serve
serve(ServiceConfig(host="127.0.0.1", port=int(sys.argv[1]), store_dir=sys.argv[2]))
`;

export async function startBackend(port: number): Promise<Backend> {
  const storeDir = mkdtempSync(join(tmpdir(), "privacy-elicit-ui-"));
  const proc: ChildProcess = spawn(
    "python3",
    ["-c", SERVER_SCRIPT, String(port), storeDir],
    { stdio: "ignore" },
  );
  const baseUrl = `http://127.0.0.1:${port}`;
  let ready = false;
  for (let attempt = 0; attempt < 150 && !ready; attempt++) {
    try {
      const response = await fetch(`${baseUrl}/sessions/__probe__`);
      ready = response.status === 404;
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 200));
    }
  }
  if (!ready) {
    proc.kill("SIGKILL");
    throw new Error("backend did not become ready");
  }
  return {
    baseUrl,
    storeDir,
    stop: () =>
      new Promise<void>((resolve) => {
        proc.once("exit", () => resolve());
        proc.kill("SIGTERM");
      }),
  };
}

export const GOAL =
  "Design an attendee attention tracking feature for a video conferencing application";
