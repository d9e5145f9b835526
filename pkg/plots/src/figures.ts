/**
 * The four report figures rendered from the lab CLI's CSV files.
 *
 * Figures never recompute physics: every number comes from the CSV, and the
 * only derived quantity is the fidelity ceiling (2^m+1)/(2^n+1) evaluated
 * from the n and m columns.
 */

import { writeFileSync } from "node:fs";

import { Chart, formatTick } from "./chart.js";
import { numeric, readCsvAll, requireColumns, SchemaError, Table } from "./csv.js";
import { encodePng } from "./png.js";
import { BLACK, Canvas, GREY, RED, SERIES_COLORS, Canvas as _C } from "./raster.js";

export type FigureKind =
  | "concentration-histogram"
  | "fidelity-vs-dimension"
  | "advantage-curve"
  | "chanopt-trace";

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  width?: number;
  height?: number;
}

export interface RenderSummary {
  kind: FigureKind;
  output: string;
  rows: number;
  /** Greatest data value that is subject to the ceiling, with the ceiling. */
  boundCheck?: { maxValue: number; bound: number; holds: boolean };
}

export function fidelityCeiling(n: number, m: number): number {
  return (2 ** m + 1) / (2 ** n + 1);
}

function groupBy<T>(items: T[], key: (item: T) => string): Map<string, T[]> {
  const out = new Map<string, T[]>();
  for (const item of items) {
    const k = key(item);
    const bucket = out.get(k);
    if (bucket) {
      bucket.push(item);
    } else {
      out.set(k, [item]);
    }
  }
  return out;
}

function renderConcentrationHistogram(table: Table, width: number, height: number): Canvas {
  requireColumns(table, ["n", "m", "f"], "concentration-histogram");
  const ns = numeric(table, "n");
  const ms = numeric(table, "m");
  const fs = numeric(table, "f");
  const rows = ns.map((n, i) => ({ n, m: ms[i], f: fs[i] }));
  const groups = [...groupBy(rows, (r) => String(r.n)).entries()].sort(
    (a, b) => Number(a[0]) - Number(b[0]),
  );
  const canvas = new Canvas(width, height);
  canvas.text(
    Math.round((width - canvas.textWidth("CHANNEL SELF-FIDELITY CONCENTRATION")) / 2),
    6,
    "CHANNEL SELF-FIDELITY CONCENTRATION",
    BLACK,
  );
  const fMin = Math.min(...fs);
  const fMax = Math.max(...fs);
  const panelTop = 22;
  const panelH = Math.floor((height - panelTop - 26) / groups.length);
  const bins = 60;
  groups.forEach(([label, group], gi) => {
    const top = panelTop + gi * panelH;
    const counts = new Array<number>(bins).fill(0);
    for (const row of group) {
      let bin = Math.floor(((row.f - fMin) / (fMax - fMin || 1)) * bins);
      if (bin >= bins) {
        bin = bins - 1;
      }
      counts[bin]++;
    }
    const peak = Math.max(...counts, 1);
    const chart = new Chart(canvas, [fMin, fMax], [0, peak], { top: top + 10, bottom: height - (top + panelH - 4) });
    const color = SERIES_COLORS[gi % SERIES_COLORS.length];
    const barW = (chart.frame.right - chart.frame.left) / bins;
    counts.forEach((count, b) => {
      if (count === 0) {
        return;
      }
      const x = chart.frame.left + b * barW;
      const y = chart.py(count);
      canvas.fillRect(Math.round(x), Math.round(y), Math.max(1, Math.round(barW) - 1), chart.frame.bottom - Math.round(y), color);
    });
    canvas.line(chart.frame.left, chart.frame.top, chart.frame.left, chart.frame.bottom, BLACK);
    canvas.line(chart.frame.left, chart.frame.bottom, chart.frame.right, chart.frame.bottom, BLACK);
    const bound = fidelityCeiling(group[0].n, group[0].m);
    if (bound >= fMin && bound <= fMax) {
      const xb = Math.round(chart.px(bound));
      for (let y = chart.frame.top; y < chart.frame.bottom; y += 6) {
        canvas.line(xb, y, xb, Math.min(y + 2, chart.frame.bottom), RED);
      }
    }
    const mean = group.reduce((acc, r) => acc + r.f, 0) / group.length;
    const xm = Math.round(chart.px(mean));
    canvas.line(xm, chart.frame.top, xm, chart.frame.bottom, GREY);
    canvas.text(chart.frame.right - canvas.textWidth(`N=${label}`) - 2, chart.frame.top + 2, `N=${label}`, BLACK);
  });
  canvas.text(64, height - 12, `F FROM ${formatTick(fMin)} TO ${formatTick(fMax)}`, BLACK);
  return canvas;
}

function renderFidelityVsDimension(
  table: Table,
  width: number,
  height: number,
): { canvas: Canvas; boundCheck: RenderSummary["boundCheck"] } {
  requireColumns(table, ["kind", "n", "m", "favg"], "fidelity-vs-dimension");
  const ns = numeric(table, "n");
  const ms = numeric(table, "m");
  const favg = numeric(table, "favg");
  const kinds = table.rows.map((r) => r.kind);
  const canvas = new Canvas(width, height);
  const nLo = Math.min(...ns) - 0.5;
  const nHi = Math.max(...ns) + 0.5;
  const chart = new Chart(canvas, [nLo, nHi], [0, 1], {
    title: "AVERAGE FIDELITY VS QUBIT COUNT",
    xLabel: "QUBITS N",
    yLabel: "FAVG",
  });
  chart.drawAxes();
  const boundByN = new Map<number, number>();
  ns.forEach((n, i) => boundByN.set(n, fidelityCeiling(n, ms[i])));
  const boundNs = [...boundByN.keys()].sort((a, b) => a - b);
  chart.polyline(boundNs, boundNs.map((n) => boundByN.get(n)!), RED);
  canvas.text(
    chart.frame.right - canvas.textWidth("CEILING (2^M+1)/(2^N+1)") - 2,
    Math.round(chart.py(boundByN.get(boundNs[boundNs.length - 1])!)) - 10,
    "CEILING (2^M+1)/(2^N+1)",
    RED,
  );
  const kindNames = [...new Set(kinds)];
  kindNames.forEach((kindName, ki) => {
    const color = SERIES_COLORS[ki % SERIES_COLORS.length];
    table.rows.forEach((row, i) => {
      if (row.kind === kindName) {
        canvas.marker(chart.px(ns[i]), chart.py(favg[i]), color);
      }
    });
  });
  chart.legend(kindNames.map((k, ki) => [k.toUpperCase(), SERIES_COLORS[ki % SERIES_COLORS.length]]));
  let holds = true;
  let maxValue = -Infinity;
  favg.forEach((value, i) => {
    maxValue = Math.max(maxValue, value);
    if (value > fidelityCeiling(ns[i], ms[i]) + 1e-9) {
      holds = false;
    }
  });
  return { canvas, boundCheck: { maxValue, bound: Math.max(...boundByN.values()), holds } };
}

function renderAdvantageCurve(
  table: Table,
  width: number,
  height: number,
): { canvas: Canvas; boundCheck: RenderSummary["boundCheck"] } {
  requireColumns(
    table,
    ["n", "m", "lambda", "trials", "f_prs", "f_haar", "win_prob", "stderr"],
    "advantage-curve",
  );
  const lam = numeric(table, "lambda");
  const ns = numeric(table, "n");
  const ms = numeric(table, "m");
  const win = numeric(table, "win_prob");
  const fPrs = numeric(table, "f_prs");
  const fHaar = numeric(table, "f_haar");
  const stderr = numeric(table, "stderr");
  const canvas = new Canvas(width, height);
  const chart = new Chart(canvas, [Math.min(...lam) - 1, Math.max(...lam) + 1], [0, 1.05], {
    title: "DISTINGUISHER ADVANTAGE VS KEY LENGTH",
    xLabel: "KEY BITS",
    yLabel: "PROB",
  });
  chart.drawAxes();
  chart.boundLine(0.5, GREY, "WIN=1/2");
  let holds = true;
  let maxHaar = -Infinity;
  let maxBound = -Infinity;
  table.rows.forEach((_, i) => {
    const bound = fidelityCeiling(ns[i], ms[i]);
    maxBound = Math.max(maxBound, bound);
    maxHaar = Math.max(maxHaar, fHaar[i]);
    if (fHaar[i] > bound + 5 * stderr[i] + 1e-9) {
      holds = false;
    }
    const xb = chart.px(lam[i]);
    canvas.dashedHLine(Math.round(xb) - 8, Math.round(xb) + 8, Math.round(chart.py(bound)), RED);
    canvas.line(xb, chart.py(win[i] - 5 * stderr[i]), xb, chart.py(win[i] + 5 * stderr[i]), SERIES_COLORS[0]);
    canvas.marker(xb, chart.py(win[i]), SERIES_COLORS[0]);
    canvas.marker(xb, chart.py(fPrs[i]), SERIES_COLORS[1]);
    canvas.marker(xb, chart.py(fHaar[i]), SERIES_COLORS[2]);
  });
  chart.legend([
    ["WIN", SERIES_COLORS[0]],
    ["F KEYED", SERIES_COLORS[1]],
    ["F HAAR", SERIES_COLORS[2]],
    ["CEILING", RED],
  ]);
  return { canvas, boundCheck: { maxValue: maxHaar, bound: maxBound, holds } };
}

function renderChanoptTrace(
  table: Table,
  width: number,
  height: number,
): { canvas: Canvas; boundCheck: RenderSummary["boundCheck"] } {
  requireColumns(table, ["n", "m", "restart", "iteration", "objective"], "chanopt-trace");
  const ns = numeric(table, "n");
  const ms = numeric(table, "m");
  const restart = numeric(table, "restart");
  const iteration = numeric(table, "iteration");
  const objective = numeric(table, "objective");
  const bound = fidelityCeiling(ns[0], ms[0]);
  const canvas = new Canvas(width, height);
  const maxIter = Math.max(...iteration);
  const chart = new Chart(canvas, [0, maxIter || 1], [0, Math.max(1, bound) * 1.05], {
    title: `FIDELITY ASCENT N=${ns[0]} M=${ms[0]}`,
    xLabel: "ACCEPTED STEP",
    yLabel: "FAVG",
  });
  chart.drawAxes();
  const byRestart = groupBy(
    table.rows.map((_, i) => ({ r: restart[i], it: iteration[i], obj: objective[i] })),
    (row) => String(row.r),
  );
  [...byRestart.entries()]
    .sort((a, b) => Number(a[0]) - Number(b[0]))
    .forEach(([label, rows], ri) => {
      const color = SERIES_COLORS[ri % SERIES_COLORS.length];
      const sorted = rows.sort((a, b) => a.it - b.it);
      chart.polyline(sorted.map((row) => row.it), sorted.map((row) => row.obj), color);
    });
  chart.boundLine(bound, RED, "CEILING (2^M+1)/(2^N+1)");
  const maxValue = Math.max(...objective);
  return { canvas, boundCheck: { maxValue, bound, holds: maxValue <= bound + 1e-6 } };
}

export function render(spec: FigureSpec): RenderSummary {
  const width = spec.width ?? 640;
  const height = spec.height ?? 440;
  if (width < 160 || height < 120) {
    throw new SchemaError("figure dimensions too small to draw a frame");
  }
  const table = readCsvAll(spec.inputs);
  if (table.rows.length === 0) {
    throw new SchemaError("input carries no data rows");
  }
  let canvas: Canvas;
  let boundCheck: RenderSummary["boundCheck"];
  switch (spec.kind) {
    case "concentration-histogram":
      canvas = renderConcentrationHistogram(table, width, height);
      break;
    case "fidelity-vs-dimension": {
      const out = renderFidelityVsDimension(table, width, height);
      canvas = out.canvas;
      boundCheck = out.boundCheck;
      break;
    }
    case "advantage-curve": {
      const out = renderAdvantageCurve(table, width, height);
      canvas = out.canvas;
      boundCheck = out.boundCheck;
      break;
    }
    case "chanopt-trace": {
      const out = renderChanoptTrace(table, width, height);
      canvas = out.canvas;
      boundCheck = out.boundCheck;
      break;
    }
    default:
      throw new SchemaError(`unknown figure kind ${String(spec.kind)}`);
  }
  writeFileSync(spec.output, encodePng(canvas.width, canvas.height, canvas.pixels));
  return { kind: spec.kind, output: spec.output, rows: table.rows.length, boundCheck };
}
