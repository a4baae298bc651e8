/**
 * Normalization of raw trace records into adjacency call graphs.
 *
 * Frames are mapped to the same dotted names the static analyzer emits:
 * module bodies are named by the module, methods carry their defining
 * class, lambdas carry their line. Frames from files outside the traced
 * root and interpreter-internal frames (import machinery, frozen modules,
 * site startup) are dropped according to a data-file denylist.
 */

import { readFileSync } from "node:fs";
import * as path from "node:path";

export interface FrameRecord {
  file: string;
  name: string;
  line: number;
  cls: string | null;
  kind?: "module" | "function" | "class";
}

export interface CallRecord {
  caller: FrameRecord;
  callee: FrameRecord;
}

export interface Denylist {
  module_prefixes: string[];
  function_names: string[];
}

export interface FilterResult {
  kept: CallRecord[];
  dropped: number;
}

export type Adjacency = Record<string, string[]>;

export function loadDenylist(filePath: string): Denylist {
  const raw = JSON.parse(readFileSync(filePath, "utf-8"));
  return {
    module_prefixes: raw.module_prefixes ?? [],
    function_names: raw.function_names ?? [],
  };
}

export function parseRecords(jsonl: string): CallRecord[] {
  const records: CallRecord[] = [];
  for (const line of jsonl.split("\n")) {
    const trimmed = line.trim();
    if (trimmed.length > 0) {
      records.push(JSON.parse(trimmed) as CallRecord);
    }
  }
  return records;
}

/** Dotted module name for a file under the traced root, else null. */
export function moduleNameFor(file: string, root: string): string | null {
  const rel = path.relative(path.resolve(root), path.resolve(file));
  if (rel.startsWith("..") || path.isAbsolute(rel)) {
    return null;
  }
  if (!rel.endsWith(".py")) {
    return null;
  }
  const parts = rel.slice(0, -3).split(path.sep);
  if (parts[parts.length - 1] === "__init__") {
    parts.pop();
  }
  if (parts.length === 0) {
    return null;
  }
  return parts.join(".");
}

/** Node name in the static analyzer's convention. */
export function nodeName(frame: FrameRecord, module: string): string {
  if (frame.name === "<module>" || frame.kind === "class") {
    // Class bodies execute during module (or enclosing scope) evaluation;
    // calls made there are attributed to the module, as the static
    // analyzer does for definition-time calls.
    return module;
  }
  const fn = frame.name === "<lambda>" ? `<lambda>@${frame.line}` : frame.name;
  if (frame.cls) {
    return `${module}.${frame.cls}.${fn}`;
  }
  return `${module}.${fn}`;
}

function denied(frame: FrameRecord, module: string, denylist: Denylist): boolean {
  if (denylist.function_names.includes(frame.name)) {
    return true;
  }
  return denylist.module_prefixes.some(
    (prefix) => module === prefix || module.startsWith(prefix + "."),
  );
}

/**
 * Drop records with either side outside the root or on the denylist.
 * Pure per-record predicate, so filtering is idempotent.
 */
export function filterRecords(
  records: CallRecord[],
  root: string,
  denylist: Denylist,
): FilterResult {
  const kept: CallRecord[] = [];
  let dropped = 0;
  for (const record of records) {
    const callerModule = moduleNameFor(record.caller.file, root);
    const calleeModule = moduleNameFor(record.callee.file, root);
    if (
      callerModule === null ||
      calleeModule === null ||
      record.callee.kind === "class" ||
      denied(record.caller, callerModule, denylist) ||
      denied(record.callee, calleeModule, denylist)
    ) {
      // Entering a class body is definition machinery, not a call edge.
      dropped += 1;
      continue;
    }
    kept.push(record);
  }
  return { kept, dropped };
}

/** Adjacency graph over normalized names; every endpoint gets a key. */
export function buildGraph(records: CallRecord[], root: string): Adjacency {
  const edges = new Map<string, Set<string>>();
  const nodes = new Set<string>();
  for (const record of records) {
    const callerModule = moduleNameFor(record.caller.file, root);
    const calleeModule = moduleNameFor(record.callee.file, root);
    if (callerModule === null || calleeModule === null) {
      continue;
    }
    const caller = nodeName(record.caller, callerModule);
    const callee = nodeName(record.callee, calleeModule);
    nodes.add(caller);
    nodes.add(callee);
    if (!edges.has(caller)) {
      edges.set(caller, new Set());
    }
    edges.get(caller)!.add(callee);
  }
  const graph: Adjacency = {};
  for (const node of [...nodes].sort()) {
    graph[node] = [...(edges.get(node) ?? new Set<string>())].sort();
  }
  return graph;
}

/** Stable serialization: sorted keys, two-space indent, trailing newline. */
export function serializeGraph(graph: Adjacency): string {
  const ordered: Adjacency = {};
  for (const key of Object.keys(graph).sort()) {
    ordered[key] = [...graph[key]].sort();
  }
  return JSON.stringify(ordered, null, 2) + "\n";
}

export function edgePairs(graph: Adjacency): Set<string> {
  const pairs = new Set<string>();
  for (const [caller, callees] of Object.entries(graph)) {
    for (const callee of callees) {
      pairs.add(`${caller} -> ${callee}`);
    }
  }
  return pairs;
}
