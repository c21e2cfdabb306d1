/**
 * Figure renderers: pure views over the simulation CSV artifacts.
 *
 * No statistic shown here is recomputed — fitted slopes, r^2 values, and
 * masses all come straight from CSV columns written by the analysis side.
 */

import { loadCsv, numbers, requireColumns, SchemaError, Table } from "./csv.js";
import { fmt, linearScale, plotArea, Scene } from "./svg.js";

export const KINDS = ["lambda_trace", "qsd_1d", "qsd_2d", "decay", "drift_scan", "charfun"] as const;
export type Kind = (typeof KINDS)[number];

export interface FigureJob {
  kind: Kind;
  input: string;
  input2?: string;
  burnInFraction?: number;
}

const COLORS = ["#1f5fa8", "#c44e52", "#3a923a", "#8172b2"];

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (lo > hi) throw new SchemaError("no finite values to plot");
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return [lo, hi];
}

function scales(xs: number[], ys: number[]) {
  const area = plotArea();
  const [xlo, xhi] = extent(xs);
  const [ylo, yhi] = extent(ys);
  return {
    sx: linearScale(xlo, xhi, area.left, area.right),
    sy: linearScale(ylo, yhi, area.bottom, area.top),
  };
}

function finitePairs(xs: number[], ys: number[]): Array<[number, number]> {
  const out: Array<[number, number]> = [];
  for (let i = 0; i < xs.length; i++) {
    if (Number.isFinite(xs[i]) && Number.isFinite(ys[i])) out.push([xs[i], ys[i]]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// renderers
// ---------------------------------------------------------------------------

function renderLambdaTrace(table: Table, burnInFraction: number): string {
  requireColumns(table, ["epoch", "log_m"]);
  const epoch = numbers(table, "epoch");
  const logM = numbers(table, "log_m");
  const { sx, sy } = scales(epoch, logM);
  const scene = new Scene();
  scene.axes(sx, sy, "epoch", "log mean weight", "normalization trace");
  scene.polyline(
    finitePairs(epoch, logM).map(([x, y]) => [sx(x), sy(y)]),
    COLORS[0],
  );
  const burnEpoch = epoch[Math.floor(burnInFraction * epoch.length)];
  if (burnEpoch !== undefined) {
    const area = plotArea();
    scene.line(sx(burnEpoch), area.top, sx(burnEpoch), area.bottom, "#888", 1, "4 3");
    scene.text(sx(burnEpoch) + 4, area.top + 14, "burn-in", { size: 10, fill: "#666" });
  }
  return scene.render();
}

function renderQsd1d(table: Table, overlay?: Table): string {
  requireColumns(table, ["bin_center_0", "mass"]);
  const rows = finitePairs(numbers(table, "bin_center_0"), numbers(table, "mass"));
  if (rows.length === 0) throw new SchemaError("no in-box histogram rows");
  const centers = rows.map(([c]) => c);
  const mass = rows.map(([, m]) => m);
  const { sx, sy } = scales(centers, [0, ...mass]);
  const scene = new Scene();
  scene.axes(sx, sy, "x", "mass", "quasi-stationary histogram");
  const half = rows.length > 1 ? (sx(centers[1]) - sx(centers[0])) / 2 : 8;
  for (let i = 0; i < rows.length; i++) {
    const x = sx(centers[i]);
    scene.rect(x - half + 1, sy(mass[i]), 2 * half - 2, sy(0) - sy(mass[i]), "#9ec3e3", "#1f5fa8");
  }
  if (overlay) {
    requireColumns(overlay, ["bin_center_0", "mass"]);
    const pts = finitePairs(numbers(overlay, "bin_center_0"), numbers(overlay, "mass"));
    scene.polyline(pts.map(([x, y]) => [sx(x), sy(y)]), COLORS[1], 1.5, "5 3");
  }
  return scene.render();
}

function renderQsd2d(table: Table): string {
  requireColumns(table, ["bin_center_0", "bin_center_1", "mass"]);
  const c0 = numbers(table, "bin_center_0");
  const c1 = numbers(table, "bin_center_1");
  const mass = numbers(table, "mass");
  const cells: Array<[number, number, number]> = [];
  for (let i = 0; i < mass.length; i++) {
    if (Number.isFinite(c0[i]) && Number.isFinite(c1[i])) cells.push([c0[i], c1[i], mass[i]]);
  }
  if (cells.length === 0) throw new SchemaError("no in-box histogram rows");
  const { sx, sy } = scales(cells.map((c) => c[0]), cells.map((c) => c[1]));
  const maxMass = Math.max(...cells.map((c) => c[2]), Number.MIN_VALUE);
  const xs = [...new Set(cells.map((c) => c[0]))].sort((a, b) => a - b);
  const ys = [...new Set(cells.map((c) => c[1]))].sort((a, b) => a - b);
  const w = xs.length > 1 ? sx(xs[1]) - sx(xs[0]) : 16;
  const h = ys.length > 1 ? sy(ys[0]) - sy(ys[1]) : 16;
  const scene = new Scene();
  scene.axes(sx, sy, "x0", "x1", "quasi-stationary heatmap");
  for (const [x, y, m] of cells) {
    const level = Math.round(255 - 215 * Math.sqrt(m / maxMass));
    const hex = level.toString(16).padStart(2, "0");
    scene.rect(sx(x) - w / 2, sy(y) - h / 2, w, h, `#${hex}${hex}ff`);
  }
  return scene.render();
}

function renderDecay(table: Table, overlay?: Table): string {
  requireColumns(table, ["t", "tv", "slope", "r2"]);
  const t = numbers(table, "t");
  const tv = numbers(table, "tv");
  const slope = numbers(table, "slope")[0];
  const r2 = numbers(table, "r2")[0];
  const logTv = tv.map((v) => (v > 0 ? Math.log(v) : NaN));
  const { sx, sy } = scales(t, logTv);
  const scene = new Scene();
  scene.axes(sx, sy, "t", "log TV distance", "convergence toward the q.s.d.");
  const pts = finitePairs(t, logTv);
  for (const [x, y] of pts) scene.circle(sx(x), sy(y), 3, COLORS[0]);
  if (Number.isFinite(slope) && pts.length > 0) {
    // anchor the fitted exp(slope * t) overlay at the first finite point
    const [t0, y0] = pts[0];
    const line = pts.map(([x]) => [sx(x), sy(y0 + slope * (x - t0))] as [number, number]);
    scene.polyline(line, COLORS[1], 1.5, "6 3");
  }
  const area = plotArea();
  scene.text(area.right - 8, area.top + 16, `slope = ${slope.toFixed(2)}`, {
    anchor: "end",
    fill: COLORS[1],
  });
  scene.text(area.right - 8, area.top + 32, `r2 = ${r2.toFixed(3)}`, { anchor: "end", fill: COLORS[1] });
  if (overlay) {
    requireColumns(overlay, ["t", "tv"]);
    const pts2 = finitePairs(
      numbers(overlay, "t"),
      numbers(overlay, "tv").map((v) => (v > 0 ? Math.log(v) : NaN)),
    );
    for (const [x, y] of pts2) scene.circle(sx(x), sy(y), 3, COLORS[2]);
  }
  return scene.render();
}

function renderDriftScan(table: Table): string {
  requireColumns(table, ["scan_coordinate", "p", "ratio_minus_pV"]);
  const r = numbers(table, "scan_coordinate");
  const p = numbers(table, "p");
  const v = numbers(table, "ratio_minus_pV");
  const logR = r.map((x) => Math.log10(x));
  // asinh compresses the huge negative excursions while keeping signs
  const y = v.map((x) => Math.asinh(x) / Math.LN10);
  const { sx, sy } = scales(logR, y);
  const scene = new Scene();
  scene.axes(sx, sy, "log10 scan coordinate", "asinh(ratio - p V)/ln 10", "drift-condition scan");
  const pValues = [...new Set(p)].sort((a, b) => a - b);
  const area = plotArea();
  pValues.forEach((pv, idx) => {
    const pts: Array<[number, number]> = [];
    for (let i = 0; i < r.length; i++) {
      if (p[i] === pv && Number.isFinite(logR[i]) && Number.isFinite(y[i])) {
        pts.push([sx(logR[i]), sy(y[i])]);
      }
    }
    const color = COLORS[idx % COLORS.length];
    scene.polyline(pts, color);
    scene.text(area.right - 8, area.top + 16 * (idx + 1), `p = ${fmt(pv)}`, { anchor: "end", fill: color });
  });
  return scene.render();
}

function renderCharfun(table: Table): string {
  requireColumns(table, ["u_norm", "emp_real", "target_real"]);
  const u = numbers(table, "u_norm");
  const emp = numbers(table, "emp_real");
  const target = numbers(table, "target_real");
  const { sx, sy } = scales(u, [...emp, ...target]);
  const scene = new Scene();
  scene.axes(sx, sy, "|u|", "Re char. function", "sampler law check");
  scene.polyline(finitePairs(u, target).map(([x, y]) => [sx(x), sy(y)]), COLORS[1], 1.5, "6 3");
  for (const [x, y] of finitePairs(u, emp)) scene.circle(sx(x), sy(y), 3, COLORS[0]);
  const area = plotArea();
  scene.text(area.right - 8, area.top + 16, "sampled", { anchor: "end", fill: COLORS[0] });
  scene.text(area.right - 8, area.top + 32, "target", { anchor: "end", fill: COLORS[1] });
  return scene.render();
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

export function render(job: FigureJob): string {
  const table = loadCsv(job.input);
  const overlay = job.input2 !== undefined ? loadCsv(job.input2) : undefined;
  switch (job.kind) {
    case "lambda_trace":
      return renderLambdaTrace(table, job.burnInFraction ?? 0.5);
    case "qsd_1d":
      return renderQsd1d(table, overlay);
    case "qsd_2d":
      return renderQsd2d(table);
    case "decay":
      return renderDecay(table, overlay);
    case "drift_scan":
      return renderDriftScan(table);
    case "charfun":
      return renderCharfun(table);
  }
}
