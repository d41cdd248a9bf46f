import { FigureModel } from "./model.js";

export const WIDTH = 960;
export const HEIGHT = 600;
export const MARGIN = { top: 48, right: 200, bottom: 64, left: 84 };

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#e377c2",
  "#17becf",
  "#bcbd22",
  "#7f7f7f",
];

export interface Scale {
  (value: number): number;
  ticks: number[];
}

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const mult of [1, 2, 5, 10]) {
    if (mult * mag >= raw) return mult * mag;
  }
  return 10 * mag;
}

export function linearScale(
  lo: number,
  hi: number,
  pxLo: number,
  pxHi: number,
): Scale {
  if (hi === lo) {
    hi = lo + (lo === 0 ? 1 : Math.abs(lo) * 0.5);
    lo = lo - (hi - lo);
  }
  const pad = (hi - lo) * 0.03;
  const a = lo - pad;
  const b = hi + pad;
  const scale = ((v: number) => pxLo + ((v - a) / (b - a)) * (pxHi - pxLo)) as Scale;
  const step = niceStep(b - a, 6);
  const first = Math.ceil(a / step) * step;
  const ticks: number[] = [];
  for (let t = first; t <= b + 1e-12 * Math.abs(step); t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  scale.ticks = ticks;
  return scale;
}

export function log10Scale(
  lo: number,
  hi: number,
  pxLo: number,
  pxHi: number,
): Scale {
  const safeLo = Math.max(lo, Number.MIN_VALUE);
  const a = Math.log10(safeLo) - 0.02;
  const b = Math.log10(Math.max(hi, safeLo * 10)) + 0.02;
  const scale = ((v: number) =>
    pxLo +
    ((Math.log10(Math.max(v, Number.MIN_VALUE)) - a) / (b - a)) *
      (pxHi - pxLo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(a); e <= Math.floor(b); e += 1) {
    ticks.push(Math.pow(10, e));
  }
  scale.ticks = ticks;
  return scale;
}

export interface Frame {
  xScale: Scale;
  yScale: Scale;
  plotLeft: number;
  plotRight: number;
  plotTop: number;
  plotBottom: number;
}

export function buildFrame(model: FigureModel): Frame {
  const xs = model.series.flatMap((s) => s.x);
  const ysAll = model.series.flatMap((s, i) =>
    s.ystd
      ? s.y.flatMap((v, j) => [v - s.ystd![j], v + s.ystd![j]])
      : s.y,
  );
  const plotLeft = MARGIN.left;
  const plotRight = WIDTH - MARGIN.right;
  const plotTop = MARGIN.top;
  const plotBottom = HEIGHT - MARGIN.bottom;
  const xScale =
    model.xScale === "log10"
      ? log10Scale(Math.min(...xs), Math.max(...xs), plotLeft, plotRight)
      : linearScale(Math.min(...xs), Math.max(...xs), plotLeft, plotRight);
  const yScale = linearScale(
    Math.min(...ysAll),
    Math.max(...ysAll),
    plotBottom,
    plotTop,
  );
  return { xScale, yScale, plotLeft, plotRight, plotTop, plotBottom };
}

export function formatTick(value: number, divisor = 1): string {
  const v = value / divisor;
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 1e4 || abs < 1e-3) {
    return v.toExponential(2).replace("e+", "e");
  }
  const text = v.toPrecision(4);
  return text.includes(".") ? text.replace(/\.?0+$/, "") : text;
}

/** The plotted data, embedded verbatim so rendering is spot-checkable. */
export function embeddedData(model: FigureModel): string {
  return JSON.stringify({
    kind: model.kind,
    xLabel: model.xLabel,
    yLabel: model.yLabel,
    series: model.series.map((s) => ({
      label: s.label,
      x: s.x,
      y: s.y,
      ...(s.ystd ? { ystd: s.ystd } : {}),
    })),
  });
}
