#!/usr/bin/env node
/**
 * trace-gt: dynamic-trace ground-truth call graphs.
 *
 *   trace-gt run FIXTURE.py -o GT.json [--timeout SECS] [--root DIR]
 *
 * Runs the fixture under the interpreter's tracing hook, filters
 * interpreter-internal frames, and writes an adjacency JSON call graph in
 * the same format the static analyzer emits. Exit code 0 on success, 1 on
 * usage errors, 3 when the program timed out or exited nonzero (a partial
 * graph is still written).
 */

import { mkdirSync, writeFileSync } from "node:fs";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import {
  buildGraph,
  filterRecords,
  loadDenylist,
  serializeGraph,
} from "./normalize.js";
import { runTraced } from "./runner.js";

const DENYLIST_PATH = fileURLToPath(new URL("./denylist.json", import.meta.url));

interface RunOptions {
  fixture: string;
  output: string;
  timeout: number;
  root: string;
}

function usage(): never {
  console.error(
    "usage: trace-gt run FIXTURE.py -o GT.json [--timeout SECS] [--root DIR]",
  );
  process.exit(1);
}

function parseArgs(argv: string[]): RunOptions {
  if (argv.length === 0 || argv[0] !== "run") {
    usage();
  }
  let fixture: string | undefined;
  let output: string | undefined;
  let timeout = 30;
  let root: string | undefined;
  const rest = argv.slice(1);
  for (let i = 0; i < rest.length; i += 1) {
    const arg = rest[i];
    if (arg === "-o" || arg === "--output") {
      output = rest[++i];
    } else if (arg === "--timeout") {
      timeout = Number(rest[++i]);
      if (!Number.isFinite(timeout) || timeout <= 0) usage();
    } else if (arg === "--root") {
      root = rest[++i];
    } else if (!arg.startsWith("-") && fixture === undefined) {
      fixture = arg;
    } else {
      usage();
    }
  }
  if (!fixture || !output) {
    usage();
  }
  return {
    fixture,
    output,
    timeout,
    root: root ?? path.dirname(path.resolve(fixture)),
  };
}

export async function main(argv: string[]): Promise<number> {
  const options = parseArgs(argv);
  const outcome = await runTraced(options.fixture, [], options.timeout);
  const denylist = loadDenylist(DENYLIST_PATH);
  const { kept, dropped } = filterRecords(outcome.records, options.root, denylist);
  const graph = buildGraph(kept, options.root);
  mkdirSync(path.dirname(path.resolve(options.output)), { recursive: true });
  writeFileSync(options.output, serializeGraph(graph), "utf-8");
  if (dropped > 0) {
    console.error(`trace-gt: dropped ${dropped} interpreter-internal or foreign frames`);
  }
  if (outcome.timedOut) {
    console.error(`trace-gt: timed out after ${options.timeout}s; partial trace written`);
    return 3;
  }
  if (outcome.exitCode !== 0) {
    console.error(
      `trace-gt: program exited with ${outcome.exitCode}; partial trace written`,
    );
    if (outcome.stderr.trim()) {
      console.error(outcome.stderr.trim());
    }
    return 3;
  }
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${path.resolve(process.argv[1])}`).href;

if (invokedDirectly) {
  main(process.argv.slice(2)).then(
    (code) => process.exit(code),
    (err) => {
      console.error(`trace-gt: ${err}`);
      process.exit(1);
    },
  );
}
