#!/usr/bin/env node
/** Flag-driven entry point: one figure per invocation. */

import { parseArgs } from "node:util";

import { SchemaError } from "./csv.js";
import { FigureKind, render } from "./figures.js";

const KINDS: FigureKind[] = [
  "concentration-histogram",
  "fidelity-vs-dimension",
  "advantage-curve",
  "chanopt-trace",
];

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        input: { type: "string", multiple: true },
        output: { type: "string" },
        width: { type: "string" },
        height: { type: "string" },
      },
      allowPositionals: false,
    });
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 2;
  }
  const { kind, input, output, width, height } = parsed.values;
  if (!kind || !KINDS.includes(kind as FigureKind)) {
    console.error(`--kind must be one of: ${KINDS.join(", ")}`);
    return 2;
  }
  if (!input || input.length === 0 || !output) {
    console.error("--input (repeatable) and --output are required");
    return 2;
  }
  try {
    const summary = render({
      kind: kind as FigureKind,
      inputs: input,
      output,
      width: width ? Number(width) : undefined,
      height: height ? Number(height) : undefined,
    });
    const boundNote = summary.boundCheck
      ? ` max=${summary.boundCheck.maxValue.toFixed(6)} ceiling=${summary.boundCheck.bound.toFixed(6)} holds=${summary.boundCheck.holds}`
      : "";
    console.log(`[${summary.kind}] rows=${summary.rows} -> ${summary.output}${boundNote}`);
    return summary.boundCheck && !summary.boundCheck.holds ? 1 : 0;
  } catch (err) {
    if (err instanceof SchemaError || (err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`input error: ${(err as Error).message}`);
      return 2;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
