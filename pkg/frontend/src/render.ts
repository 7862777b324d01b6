/**
 * Phase-diagram figure model and SVG rendering.
 *
 * The heatmap shows the empirical identifiability probability per lattice
 * cell: x is the activity ratio K/N, y is the constraint-rank ratio of the
 * run. Rows are positioned at their measured alpha_achieved when available
 * (the rank ratio the boundary theorem speaks about), falling back to the
 * configured alpha_target; the analytical boundary overlays as a curve in
 * the same coordinates. All coordinates are emitted with fixed precision so
 * a given (CSV, spec) pair renders to identical bytes everywhere.
 */

import { PHASE_COLUMNS, THEORY_COLUMNS, Table, numericColumn, parseCsv, column } from "./csv.js";
import { viridis } from "./color.js";

export interface PlotSpec {
  phaseCsv: string;   // file contents
  phasePath: string;  // for error messages
  theoryCsv?: string;
  theoryPath?: string;
  title?: string;
}

export interface HeatRect {
  x0: number; x1: number; y0: number; y1: number; p: number;
}

export interface FigureModel {
  rects: HeatRect[];
  xRange: [number, number];
  yRange: [number, number];
  curve: Array<[number, number]>;
  title: string;
}

function binEdges(centers: number[], fallbackHalf: number): Map<number, [number, number]> {
  const sorted = [...new Set(centers)].sort((a, b) => a - b);
  const edges = new Map<number, [number, number]>();
  for (let i = 0; i < sorted.length; i++) {
    const loGap = i > 0 ? (sorted[i] - sorted[i - 1]) / 2 : fallbackHalf;
    const hiGap = i < sorted.length - 1 ? (sorted[i + 1] - sorted[i]) / 2 : fallbackHalf;
    const half = Math.min(loGap, hiGap);
    edges.set(sorted[i], [sorted[i] - half, sorted[i] + half]);
  }
  return edges;
}

export function buildModel(spec: PlotSpec): FigureModel {
  const phase = parseCsv(spec.phaseCsv, spec.phasePath, PHASE_COLUMNS);
  const epsCol = numericColumn(phase, "epsilon");
  const alphaTarget = numericColumn(phase, "alpha_target");
  const alphaAchieved = numericColumn(phase, "alpha_achieved");
  const trials = numericColumn(phase, "trials");
  const good = numericColumn(phase, "identifiable_count");
  const ambiguous = numericColumn(phase, "ambiguous_count");
  const model = column(phase, "model")[0] ?? "";

  // one display row per alpha_target, positioned at its mean achieved alpha
  const rowPos = new Map<number, number>();
  for (const t of new Set(alphaTarget)) {
    const idx = alphaTarget.flatMap((v, i) => (v === t ? [i] : []));
    const measured = idx.map((i) => alphaAchieved[i]).filter(Number.isFinite);
    rowPos.set(t, measured.length
      ? measured.reduce((a, b) => a + b, 0) / measured.length
      : t);
  }

  const ys = alphaTarget.map((t) => rowPos.get(t)!);
  const yEdges = binEdges([...rowPos.values()], 0.025);
  const xEdges = binEdges(epsCol, 0.0125);

  const rects: HeatRect[] = epsCol.map((e, i) => {
    const [x0, x1] = xEdges.get(e)!;
    const [y0, y1] = yEdges.get(ys[i])!;
    const denom = trials[i] - ambiguous[i];
    return { x0, x1, y0, y1, p: denom > 0 ? good[i] / denom : 0 };
  });

  const xs = rects.flatMap((r) => [r.x0, r.x1]);
  const yy = rects.flatMap((r) => [r.y0, r.y1]);
  const xRange: [number, number] = [Math.min(...xs), Math.max(...xs)];
  const yRange: [number, number] = [Math.min(...yy), Math.max(...yy)];

  let curve: Array<[number, number]> = [];
  if (spec.theoryCsv !== undefined) {
    const theory = parseCsv(spec.theoryCsv, spec.theoryPath ?? "theory_curve.csv", THEORY_COLUMNS);
    const te = numericColumn(theory, "epsilon");
    const td = numericColumn(theory, "delta_star");
    curve = te.map((e, i) => [e, td[i]] as [number, number])
      .filter(([e, d]) => e >= xRange[0] && e <= xRange[1] &&
                          d >= yRange[0] && d <= yRange[1]);
  }

  const title = spec.title ?? (model ? `identifiability phase diagram (${model})` : "identifiability phase diagram");
  return { rects, xRange, yRange, curve, title };
}

// ---------------------------------------------------------------- layout

export const WIDTH = 880;
export const HEIGHT = 660;
export const MARGIN = { left: 80, right: 120, top: 50, bottom: 60 } as const;

export function xPix(m: FigureModel, v: number): number {
  const w = WIDTH - MARGIN.left - MARGIN.right;
  return MARGIN.left + ((v - m.xRange[0]) / (m.xRange[1] - m.xRange[0] || 1)) * w;
}

export function yPix(m: FigureModel, v: number): number {
  const h = HEIGHT - MARGIN.top - MARGIN.bottom;
  return MARGIN.top + h - ((v - m.yRange[0]) / (m.yRange[1] - m.yRange[0] || 1)) * h;
}

export function ticks(lo: number, hi: number, n = 6): number[] {
  const span = hi - lo;
  if (span <= 0) return [lo];
  const step = niceStep(span / n);
  const first = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = first; v <= hi + 1e-12; v += step) out.push(Number(v.toFixed(10)));
  return out;
}

function niceStep(raw: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const r = raw / mag;
  const base = r >= 5 ? 10 : r >= 2 ? 5 : r >= 1 ? 2 : 1;
  return base * mag;
}

const fmt = (v: number) => v.toFixed(2);
const fmtTick = (v: number) => (Math.abs(v) < 1e-12 ? "0" : String(Number(v.toFixed(4))));

// ---------------------------------------------------------------- svg

export function renderSvg(m: FigureModel): string {
  const parts: string[] = [];
  parts.push(`<?xml version="1.0" encoding="UTF-8"?>`);
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);
  parts.push(`<text x="${WIDTH / 2}" y="28" text-anchor="middle" font-size="18">${escapeXml(m.title)}</text>`);

  for (const r of m.rects) {
    const x = xPix(m, r.x0);
    const y = yPix(m, r.y1);
    const w = xPix(m, r.x1) - x;
    const h = yPix(m, r.y0) - y;
    parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" ` +
      `fill="${viridis(r.p)}"/>`);
  }

  if (m.curve.length >= 2) {
    const pts = m.curve.map(([e, d]) => `${fmt(xPix(m, e))},${fmt(yPix(m, d))}`).join(" ");
    parts.push(`<polyline points="${pts}" fill="none" stroke="#ff3333" stroke-width="2.5"/>`);
  }

  // frame
  const x0 = MARGIN.left, x1 = WIDTH - MARGIN.right;
  const y0 = MARGIN.top, y1 = HEIGHT - MARGIN.bottom;
  parts.push(`<rect x="${x0}" y="${y0}" width="${x1 - x0}" height="${y1 - y0}" fill="none" stroke="#000000"/>`);

  for (const t of ticks(m.xRange[0], m.xRange[1])) {
    const px = xPix(m, t);
    parts.push(`<line x1="${fmt(px)}" y1="${y1}" x2="${fmt(px)}" y2="${y1 + 6}" stroke="#000000"/>`);
    parts.push(`<text x="${fmt(px)}" y="${y1 + 22}" text-anchor="middle" font-size="13">${fmtTick(t)}</text>`);
  }
  for (const t of ticks(m.yRange[0], m.yRange[1])) {
    const py = yPix(m, t);
    parts.push(`<line x1="${x0 - 6}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="#000000"/>`);
    parts.push(`<text x="${x0 - 10}" y="${fmt(py + 4)}" text-anchor="end" font-size="13">${fmtTick(t)}</text>`);
  }
  parts.push(`<text x="${(x0 + x1) / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="15">K/N</text>`);
  parts.push(
    `<text x="22" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="15" ` +
    `transform="rotate(-90 22 ${(y0 + y1) / 2})">r/N</text>`);

  // colorbar
  const cbX = WIDTH - MARGIN.right + 30;
  const steps = 64;
  const cbH = y1 - y0;
  for (let i = 0; i < steps; i++) {
    const t = 1 - i / (steps - 1);
    const yy = y0 + (i * cbH) / steps;
    parts.push(
      `<rect x="${cbX}" y="${fmt(yy)}" width="18" height="${fmt(cbH / steps + 1)}" ` +
      `fill="${viridis(t)}"/>`);
  }
  parts.push(`<rect x="${cbX}" y="${y0}" width="18" height="${cbH}" fill="none" stroke="#000000"/>`);
  for (const frac of [0, 0.5, 1]) {
    const yy = y0 + cbH * (1 - frac);
    parts.push(`<text x="${cbX + 24}" y="${fmt(yy + 4)}" font-size="12">${frac}</text>`);
  }
  parts.push(`<text x="${cbX + 9}" y="${y0 - 10}" text-anchor="middle" font-size="12">P[identifiable]</text>`);

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
