#!/usr/bin/env node
/**
 * plots <kind> --in <csv> [--in2 <csv>] --out <img> [--burn-in <fraction>]
 *
 * Renders one deterministic SVG figure per invocation.
 */

import { writeFileSync } from "node:fs";
import { NoRowsError, SchemaError } from "./csv.js";
import { FigureJob, Kind, KINDS, render } from "./figures.js";

export function parseArgs(argv: string[]): FigureJob & { out: string } {
  const [kind, ...rest] = argv;
  if (!kind || !(KINDS as readonly string[]).includes(kind)) {
    throw new SchemaError(`figure kind must be one of ${KINDS.join(", ")}`);
  }
  const opts: Record<string, string> = {};
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (!flag.startsWith("--") || value === undefined) {
      throw new SchemaError(`malformed option ${flag}`);
    }
    opts[flag.slice(2)] = value;
  }
  if (!opts.in) throw new SchemaError("--in <csv> is required");
  if (!opts.out) throw new SchemaError("--out <img> is required");
  const job: FigureJob & { out: string } = {
    kind: kind as Kind,
    input: opts.in,
    out: opts.out,
  };
  if (opts.in2 !== undefined) job.input2 = opts.in2;
  if (opts["burn-in"] !== undefined) {
    const f = Number(opts["burn-in"]);
    if (!(f >= 0 && f < 1)) throw new SchemaError("--burn-in must lie in [0, 1)");
    job.burnInFraction = f;
  }
  return job;
}

export function main(argv: string[]): number {
  let job: FigureJob & { out: string };
  try {
    job = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 2;
  }
  try {
    writeFileSync(job.out, render(job));
  } catch (err) {
    if (err instanceof NoRowsError || err instanceof SchemaError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 2;
    }
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
