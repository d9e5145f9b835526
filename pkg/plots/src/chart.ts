/** Axes, scales, ticks: the shared frame every figure draws into. */

import { BLACK, Canvas, Color, GLYPH_H, GLYPH_W, GREY, LIGHT_GREY } from "./raster.js";

export interface Frame {
  left: number;
  top: number;
  right: number;
  bottom: number;
  x0: number;
  x1: number;
  y0: number;
  y1: number;
}

export function niceTicks(lo: number, hi: number, target = 5): number[] {
  if (!(hi > lo)) {
    hi = lo + 1;
  }
  const span = hi - lo;
  const step0 = Math.pow(10, Math.floor(Math.log10(span / target)));
  const candidates = [step0, 2 * step0, 2.5 * step0, 5 * step0, 10 * step0];
  const step = candidates.find((s) => span / s <= target + 1) ?? 10 * step0;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12; v += step) {
    ticks.push(Math.abs(v) < step / 1e6 ? 0 : v);
  }
  return ticks;
}

export function formatTick(v: number): string {
  if (v === 0) {
    return "0";
  }
  const abs = Math.abs(v);
  if (abs >= 0.001 && abs < 10000) {
    return parseFloat(v.toPrecision(3)).toString();
  }
  return v.toExponential(1).replace("e", "E");
}

export class Chart {
  readonly canvas: Canvas;
  readonly frame: Frame;

  constructor(
    canvas: Canvas,
    xRange: [number, number],
    yRange: [number, number],
    opts: { title?: string; xLabel?: string; yLabel?: string; top?: number; bottom?: number } = {},
  ) {
    this.canvas = canvas;
    this.frame = {
      left: 64,
      top: opts.top ?? 30,
      right: canvas.width - 16,
      bottom: canvas.height - (opts.bottom ?? 40),
      x0: xRange[0],
      x1: xRange[1] > xRange[0] ? xRange[1] : xRange[0] + 1,
      y0: yRange[0],
      y1: yRange[1] > yRange[0] ? yRange[1] : yRange[0] + 1,
    };
    if (opts.title) {
      canvas.text(
        Math.round((canvas.width - canvas.textWidth(opts.title)) / 2),
        8,
        opts.title,
        BLACK,
      );
    }
    if (opts.xLabel) {
      canvas.text(
        Math.round((this.frame.left + this.frame.right - canvas.textWidth(opts.xLabel)) / 2),
        canvas.height - GLYPH_H - 4,
        opts.xLabel,
        BLACK,
      );
    }
    if (opts.yLabel) {
      canvas.text(4, this.frame.top - GLYPH_H - 4, opts.yLabel, BLACK);
    }
  }

  px(x: number): number {
    const { left, right, x0, x1 } = this.frame;
    return left + ((x - x0) / (x1 - x0)) * (right - left);
  }

  py(y: number): number {
    const { top, bottom, y0, y1 } = this.frame;
    return bottom - ((y - y0) / (y1 - y0)) * (bottom - top);
  }

  drawAxes(): void {
    const { left, top, right, bottom, x0, x1, y0, y1 } = this.frame;
    for (const tick of niceTicks(y0, y1)) {
      const y = Math.round(this.py(tick));
      this.canvas.dashedHLine(left + 1, right, y, LIGHT_GREY, 2, 4);
      const label = formatTick(tick);
      this.canvas.text(left - 6 - this.canvas.textWidth(label), y - 3, label, BLACK);
      this.canvas.line(left - 3, y, left, y, BLACK);
    }
    for (const tick of niceTicks(x0, x1)) {
      const x = Math.round(this.px(tick));
      const label = formatTick(tick);
      this.canvas.text(x - Math.round(this.canvas.textWidth(label) / 2), bottom + 8, label, BLACK);
      this.canvas.line(x, bottom, x, bottom + 3, BLACK);
    }
    this.canvas.line(left, top, left, bottom, BLACK);
    this.canvas.line(left, bottom, right, bottom, BLACK);
  }

  polyline(xs: number[], ys: number[], color: Color): void {
    for (let i = 1; i < xs.length; i++) {
      this.canvas.line(this.px(xs[i - 1]), this.py(ys[i - 1]), this.px(xs[i]), this.py(ys[i]), color);
    }
  }

  boundLine(y: number, color: Color, label: string): void {
    const yPix = Math.round(this.py(y));
    this.canvas.dashedHLine(this.frame.left + 1, this.frame.right, yPix, color);
    this.canvas.text(
      this.frame.right - this.canvas.textWidth(label) - 2,
      yPix - GLYPH_H - 2,
      label,
      color,
    );
  }

  legend(entries: [string, Color][]): void {
    let x = this.frame.left + 8;
    const y = this.frame.top + 4;
    for (const [label, color] of entries) {
      this.canvas.fillRect(x, y + 1, 8, 5, color);
      this.canvas.text(x + 11, y, label, BLACK);
      x += 11 + this.canvas.textWidth(label) + GLYPH_W * 2;
    }
  }
}
