import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { main, parseArgs } from "../src/cli.js";

function tmp(): string {
  return mkdtempSync(join(tmpdir(), "plots-cli-"));
}

const DECAY =
  "t,tv,slope,r2\n0.5,0.37,-2.0,0.99\n1.0,0.14,-2.0,0.99\n1.5,0.05,-2.0,0.99\n";

describe("argument parsing", () => {
  it("parses a full job", () => {
    const job = parseArgs(["decay", "--in", "a.csv", "--in2", "b.csv", "--out", "f.svg"]);
    expect(job).toMatchObject({ kind: "decay", input: "a.csv", input2: "b.csv", out: "f.svg" });
  });

  it("rejects unknown kinds", () => {
    expect(() => parseArgs(["pie", "--in", "a.csv", "--out", "f.svg"])).toThrow("figure kind");
  });

  it("requires --in and --out", () => {
    expect(() => parseArgs(["decay", "--out", "f.svg"])).toThrow("--in");
    expect(() => parseArgs(["decay", "--in", "a.csv"])).toThrow("--out");
  });
});

describe("cli entry point", () => {
  it("writes the figure and exits 0", () => {
    const dir = tmp();
    const input = join(dir, "decay.csv");
    writeFileSync(input, DECAY);
    const out = join(dir, "decay.svg");
    expect(main(["decay", "--in", input, "--out", out])).toBe(0);
    expect(readFileSync(out, "utf8")).toContain("slope = -2.00");
  });

  it("is byte-identical across runs", () => {
    const dir = tmp();
    const input = join(dir, "decay.csv");
    writeFileSync(input, DECAY);
    const out1 = join(dir, "a.svg");
    const out2 = join(dir, "b.svg");
    expect(main(["decay", "--in", input, "--out", out1])).toBe(0);
    expect(main(["decay", "--in", input, "--out", out2])).toBe(0);
    expect(readFileSync(out1)).toEqual(readFileSync(out2));
  });

  it("exits nonzero with 'no rows' for an empty file", () => {
    const dir = tmp();
    const input = join(dir, "empty.csv");
    writeFileSync(input, "t,tv,slope,r2\n");
    expect(main(["decay", "--in", input, "--out", join(dir, "f.svg")])).toBe(2);
  });

  it("exits nonzero for a bad kind", () => {
    expect(main(["pie", "--in", "a.csv", "--out", "f.svg"])).toBe(2);
  });

  it("exits nonzero for a missing input file", () => {
    const dir = tmp();
    expect(main(["decay", "--in", join(dir, "nope.csv"), "--out", join(dir, "f.svg")])).toBe(1);
  });
});
