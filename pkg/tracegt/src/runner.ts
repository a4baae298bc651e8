/**
 * Runs a Python program under the tracing shim and collects raw records.
 */

import { spawn } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { CallRecord, parseRecords } from "./normalize.js";

export interface TraceOutcome {
  records: CallRecord[];
  exitCode: number | null;
  timedOut: boolean;
  stderr: string;
}

const SHIM_PATH = fileURLToPath(new URL("./shim.py", import.meta.url));

export function pythonExecutable(): string {
  return process.env.PYTHON ?? "python3";
}

export function runTraced(
  program: string,
  args: string[] = [],
  timeoutSecs = 30,
): Promise<TraceOutcome> {
  const workdir = mkdtempSync(path.join(tmpdir(), "trace-gt-"));
  const recordsPath = path.join(workdir, "records.jsonl");
  return new Promise((resolve, reject) => {
    const child = spawn(
      pythonExecutable(),
      [SHIM_PATH, recordsPath, path.resolve(program), ...args],
      { stdio: ["ignore", "ignore", "pipe"] },
    );
    let stderr = "";
    let timedOut = false;
    child.stderr.on("data", (chunk) => {
      stderr += String(chunk);
    });
    // SIGINT first so the shim can flush a partial trace; force-kill after
    // a grace period.
    let killTimer: NodeJS.Timeout | undefined;
    const timer = setTimeout(() => {
      timedOut = true;
      child.kill("SIGINT");
      killTimer = setTimeout(() => child.kill("SIGKILL"), 2000);
    }, timeoutSecs * 1000);
    child.on("error", (err) => {
      clearTimeout(timer);
      if (killTimer) clearTimeout(killTimer);
      rmSync(workdir, { recursive: true, force: true });
      reject(err);
    });
    child.on("close", (code) => {
      clearTimeout(timer);
      if (killTimer) clearTimeout(killTimer);
      let records: CallRecord[] = [];
      try {
        records = parseRecords(readFileSync(recordsPath, "utf-8"));
      } catch {
        records = []; // killed before the shim could flush
      }
      rmSync(workdir, { recursive: true, force: true });
      resolve({ records, exitCode: code, timedOut, stderr });
    });
  });
}
