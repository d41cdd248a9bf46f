import Papa from "papaparse";

import { FigureKind, FigureModel, SchemaError, Series } from "./model.js";

type Row = Record<string, string>;

const REQUIRED_COLUMNS: Record<FigureKind, string[]> = {
  gain_sweep: [
    "scenario_id",
    "plan_id",
    "subcarrier_index",
    "frequency_hz",
    "normalized_gain",
  ],
  rate_trace: ["seed", "outer_iteration", "sum_rate_bps_hz"],
  rate_vs_power: ["scenario", "p_max_dbm", "scheme", "mean_rate", "std_rate"],
  shape_objective: ["scenario", "a", "m_x", "m_y", "objective"],
};

function parseRows(kind: FigureKind, text: string): Row[] {
  const parsed = Papa.parse<Row>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`CSV parse error: ${first.message} (row ${first.row})`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const column of REQUIRED_COLUMNS[kind]) {
    if (!fields.includes(column)) {
      throw new SchemaError(
        `CSV is missing column '${column}' required for kind '${kind}' ` +
          `(found: ${fields.join(", ")})`,
      );
    }
  }
  if (parsed.data.length === 0) {
    throw new SchemaError("CSV has a header but no data rows");
  }
  return parsed.data;
}

function num(row: Row, column: string): number {
  const value = Number(row[column]);
  if (!Number.isFinite(value)) {
    throw new SchemaError(`non-numeric value '${row[column]}' in column '${column}'`);
  }
  return value;
}

/** Group rows into one series per value of `key`, preserving row order. */
function groupSeries(
  rows: Row[],
  key: string,
  xCol: string,
  yCol: string,
  stdCol?: string,
): Series[] {
  const order: string[] = [];
  const byLabel = new Map<string, Series>();
  for (const row of rows) {
    const label = row[key];
    let series = byLabel.get(label);
    if (!series) {
      series = { label, x: [], y: [] };
      if (stdCol) series.ystd = [];
      byLabel.set(label, series);
      order.push(label);
    }
    series.x.push(num(row, xCol));
    series.y.push(num(row, yCol));
    if (stdCol) series.ystd!.push(num(row, stdCol));
  }
  return order.map((label) => byLabel.get(label)!);
}

export function loadFigure(kind: FigureKind, text: string): FigureModel {
  const rows = parseRows(kind, text);
  switch (kind) {
    case "gain_sweep":
      return {
        kind,
        title: "normalized array gain per subcarrier",
        xLabel: "frequency [ghz]",
        yLabel: "normalized gain",
        xScale: "linear",
        xTickDivisor: 1e9,
        series: groupSeries(rows, "plan_id", "frequency_hz", "normalized_gain"),
      };
    case "rate_trace":
      return {
        kind,
        title: "sum rate per outer iteration",
        xLabel: "outer iteration",
        yLabel: "sum rate [bps/hz]",
        xScale: "linear",
        series: groupSeries(rows, "seed", "outer_iteration", "sum_rate_bps_hz").map(
          (s) => ({ ...s, label: `seed ${s.label}` }),
        ),
      };
    case "rate_vs_power":
      return {
        kind,
        title: "sum rate vs transmit power",
        xLabel: "p_max [dbm]",
        yLabel: "mean sum rate [bps/hz]",
        xScale: "linear",
        series: groupSeries(rows, "scheme", "p_max_dbm", "mean_rate", "std_rate"),
      };
    case "shape_objective":
      return {
        kind,
        title: "shape objective vs rows",
        xLabel: "m_x",
        yLabel: "objective",
        xScale: "log10",
        series: groupSeries(rows, "a", "m_x", "objective").map((s) => ({
          ...s,
          label: `a = ${s.label}`,
        })),
      };
  }
}
