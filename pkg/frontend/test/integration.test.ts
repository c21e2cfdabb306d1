/**
 * End-to-end: run the simulation CLI to produce real CSV artifacts, then
 * check that every figure kind renders from them byte-deterministically and
 * that the decay figure shows exactly the slope recorded in the CSV.
 */

import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { beforeAll, describe, expect, it } from "vitest";

import { render } from "../src/figures.js";
import type { Kind } from "../src/figures.js";

const CONFIG = (out: string) => `
theorem_case = "nonsingular"

[process]
variant = "overdamped"
dimension = 1
drift = "zero"
dt = 0.01

[potential]
confining = "power"
confining_exponent = 2.0
confining_coefficient = 0.5

[particles]
n = 512
delta = 0.1
epochs = 40
start = [0.0]
bins = 8
box_lo = [-3.0]
box_hi = [3.0]

[lyapunov]
kind = "exp_radial"
eps = 0.1

[output]
seed = 99
directory = "${out}"
`;

const LEVY_CONFIG = (out: string) => `
theorem_case = "levy"

[process]
variant = "levy"
family = "isotropic_stable"
dimension = 2
alpha = 1.5
dt = 0.1

[potential]
singular = "riesz"
confining = "power"

[particles]
n = 256
delta = 0.1
epochs = 30
start = [1.0, 0.0]
bins = 8
box_lo = [-2.0, -2.0]
box_hi = [2.0, 2.0]

[output]
seed = 99
directory = "${out}"
`;

let dir: string;

function runSim(command: string, configText: (out: string) => string, sub: string): string {
  const out = join(dir, sub);
  const cfg = join(dir, `${sub}.toml`);
  writeFileSync(cfg, configText(out));
  execFileSync("fksim", [command, "--config", cfg], { stdio: "pipe" });
  return out;
}

beforeAll(() => {
  dir = mkdtempSync(join(tmpdir(), "plots-e2e-"));
}, 120_000);

describe("figures from real simulation artifacts", () => {
  let artifacts: Array<{ kind: Kind; input: string }>;

  beforeAll(() => {
    const base = runSim("lambda", CONFIG, "lam");
    runSim("qsd", CONFIG, "qsd1");
    runSim("convergence", CONFIG, "conv");
    runSim("lyapunov", CONFIG, "scan");
    const levy = runSim("sampler-test", LEVY_CONFIG, "char");
    runSim("qsd", LEVY_CONFIG, "qsd2");
    artifacts = [
      { kind: "lambda_trace", input: join(base, "lambda_trace.csv") },
      { kind: "qsd_1d", input: join(dir, "qsd1", "qsd.csv") },
      { kind: "qsd_2d", input: join(dir, "qsd2", "qsd.csv") },
      { kind: "decay", input: join(dir, "conv", "convergence.csv") },
      { kind: "drift_scan", input: join(dir, "scan", "lyapunov_scan.csv") },
      { kind: "charfun", input: join(levy, "charfun.csv") },
    ];
  }, 300_000);

  it("renders every kind byte-deterministically", () => {
    for (const { kind, input } of artifacts) {
      const first = render({ kind, input });
      expect(first.startsWith("<svg "), `${kind} renders`).toBe(true);
      expect(render({ kind, input }), `${kind} deterministic`).toBe(first);
    }
  });

  it("annotates the decay slope with exactly the CSV's fitted value", () => {
    const input = join(dir, "conv", "convergence.csv");
    const lines = readFileSync(input, "utf8").trim().split("\n");
    const header = lines[0].split(",");
    const slope = Number(lines[1].split(",")[header.indexOf("slope")]);
    const svg = render({ kind: "decay", input });
    expect(svg).toContain(`slope = ${slope.toFixed(2)}`);
  });
});
