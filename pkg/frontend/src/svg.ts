/**
 * Minimal deterministic SVG scene builder.
 *
 * No timestamps, no randomness, fixed styles, and one number formatter used
 * everywhere so that identical inputs always produce identical bytes.
 */

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { left: 64, right: 16, top: 36, bottom: 46 };

export function fmt(v: number): string {
  if (!Number.isFinite(v)) return String(v);
  if (v === 0) return "0";
  let s = v.toPrecision(6);
  if (s.includes(".") && !s.includes("e")) {
    s = s.replace(/\.?0+$/, "");
  }
  return s === "-0" ? "0" : s;
}

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function linearScale(lo: number, hi: number, a: number, b: number): Scale {
  const span = hi - lo || 1;
  const f = ((v: number) => a + ((v - lo) / span) * (b - a)) as Scale;
  f.domain = [lo, hi];
  return f;
}

/** Round-number ticks covering [lo, hi] (1/2/5 ladder). */
export function ticks(lo: number, hi: number, count = 6): number[] {
  const span = hi - lo;
  if (!(span > 0)) return [lo];
  const raw = span / Math.max(1, count - 1);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm >= 5 ? 10 : norm >= 2 ? 5 : norm >= 1 ? 2 : 1) * mag;
  const out: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    out.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return out;
}

export class Scene {
  private parts: string[] = [];

  add(part: string): void {
    this.parts.push(part);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.add(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  polyline(pts: Array<[number, number]>, stroke: string, width = 1.5, dash = ""): void {
    if (pts.length === 0) return;
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    const coords = pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.add(`<polyline points="${coords}" fill="none" stroke="${stroke}" stroke-width="${width}"${d}/>`);
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.add(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${fill}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string, stroke = "none"): void {
    this.add(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}" stroke="${stroke}"/>`,
    );
  }

  text(x: number, y: number, s: string, opts: { size?: number; anchor?: string; fill?: string } = {}): void {
    const size = opts.size ?? 12;
    const anchor = opts.anchor ?? "start";
    const fill = opts.fill ?? "#222";
    this.add(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-family="monospace" font-size="${size}" text-anchor="${anchor}" fill="${fill}">${escapeXml(s)}</text>`,
    );
  }

  /** Axes box with ticks and labels for the plotting area. */
  axes(sx: Scale, sy: Scale, xLabel: string, yLabel: string, title: string): void {
    const { left, top } = MARGIN;
    const right = WIDTH - MARGIN.right;
    const bottom = HEIGHT - MARGIN.bottom;
    this.rect(left, top, right - left, bottom - top, "none", "#222");
    for (const t of ticks(sx.domain[0], sx.domain[1])) {
      const x = sx(t);
      this.line(x, bottom, x, bottom + 5, "#222");
      this.text(x, bottom + 18, fmt(t), { anchor: "middle", size: 10 });
    }
    for (const t of ticks(sy.domain[0], sy.domain[1])) {
      const y = sy(t);
      this.line(left - 5, y, left, y, "#222");
      this.text(left - 8, y + 3, fmt(t), { anchor: "end", size: 10 });
    }
    this.text((left + right) / 2, HEIGHT - 10, xLabel, { anchor: "middle" });
    this.add(
      `<text x="16" y="${fmt((top + bottom) / 2)}" font-family="monospace" font-size="12" text-anchor="middle" fill="#222" transform="rotate(-90 16 ${fmt((top + bottom) / 2)})">${escapeXml(yLabel)}</text>`,
    );
    this.text((left + right) / 2, 22, title, { anchor: "middle", size: 14 });
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
      `<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
      ...this.parts,
      "</svg>",
      "",
    ].join("\n");
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function plotArea(): { left: number; right: number; top: number; bottom: number } {
  return {
    left: MARGIN.left,
    right: WIDTH - MARGIN.right,
    top: MARGIN.top,
    bottom: HEIGHT - MARGIN.bottom,
  };
}
