export type FigureKind =
  | "gain_sweep"
  | "rate_trace"
  | "rate_vs_power"
  | "shape_objective";

export const FIGURE_KINDS: FigureKind[] = [
  "gain_sweep",
  "rate_trace",
  "rate_vs_power",
  "shape_objective",
];

/** One plotted curve; x/y keep the CSV row order, values untouched. */
export interface Series {
  label: string;
  x: number[];
  y: number[];
  /** optional symmetric spread drawn as whiskers (rate_vs_power std) */
  ystd?: number[];
}

export interface FigureModel {
  kind: FigureKind;
  title: string;
  xLabel: string;
  yLabel: string;
  xScale: "linear" | "log10";
  /** divisor applied to x only when formatting tick labels (e.g. Hz -> GHz) */
  xTickDivisor?: number;
  series: Series[];
}

export class SchemaError extends Error {}
