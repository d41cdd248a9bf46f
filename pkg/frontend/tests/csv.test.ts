import { readFileSync } from "node:fs";
import path from "node:path";
import { describe, expect, it } from "vitest";

import { loadFigure } from "../src/csv.js";
import { SchemaError } from "../src/model.js";

const FIXTURES = path.join(__dirname, "fixtures");

function fixture(name: string): string {
  return readFileSync(path.join(FIXTURES, name), "utf8");
}

describe("loadFigure", () => {
  it("parses a gain sweep into one series per plan", () => {
    const fig = loadFigure("gain_sweep", fixture("gain_sweep.csv"));
    expect(fig.series.map((s) => s.label)).toEqual([
      "scheme1_16x16",
      "scheme2_4x8x8",
      "scheme3_4x16x4",
    ]);
    for (const s of fig.series) {
      expect(s.x).toHaveLength(128);
      expect(Math.min(...s.y)).toBeGreaterThan(0);
      expect(Math.max(...s.y)).toBeLessThanOrEqual(1);
    }
  });

  it("parses a rate trace into one series per seed", () => {
    const fig = loadFigure("rate_trace", fixture("rate_trace.csv"));
    expect(fig.series.length).toBeGreaterThanOrEqual(2);
    for (const s of fig.series) {
      expect(s.label).toMatch(/^seed \d+$/);
      // primary invariant mirrored in the plotted data: non-decreasing
      for (let i = 1; i < s.y.length; i += 1) {
        expect(s.y[i]).toBeGreaterThanOrEqual(s.y[i - 1] - 1e-8);
      }
    }
  });

  it("parses rate-vs-power with std whiskers", () => {
    const fig = loadFigure("rate_vs_power", fixture("rate_vs_power.csv"));
    const kt16 = fig.series.find((s) => s.label === "kt16")!;
    const noTd = fig.series.find((s) => s.label === "no_td")!;
    expect(kt16.ystd).toBeDefined();
    expect(kt16.x).toEqual(noTd.x);
    // delay-enabled scheme stays above the delay-free one at every power
    kt16.y.forEach((v, i) => expect(v).toBeGreaterThan(noTd.y[i]));
  });

  it("parses the shape objective on a log axis", () => {
    const fig = loadFigure("shape_objective", fixture("shape_objective.csv"));
    expect(fig.xScale).toBe("log10");
    expect(fig.series.map((s) => s.label)).toEqual(["a = 0.005", "a = 0.01"]);
    for (const s of fig.series) {
      const best = s.x[s.y.indexOf(Math.max(...s.y))];
      expect(best).toBe(40);
    }
  });

  it("rejects a CSV with the wrong schema for the kind", () => {
    expect(() => loadFigure("gain_sweep", fixture("rate_trace.csv"))).toThrow(
      SchemaError,
    );
    expect(() => loadFigure("gain_sweep", fixture("rate_trace.csv"))).toThrow(
      /missing column/,
    );
  });

  it("rejects an empty document and non-numeric cells", () => {
    expect(() =>
      loadFigure("rate_trace", "seed,outer_iteration,sum_rate_bps_hz\n"),
    ).toThrow(/no data rows/);
    expect(() =>
      loadFigure(
        "rate_trace",
        "seed,outer_iteration,sum_rate_bps_hz\n0,0,banana\n",
      ),
    ).toThrow(/non-numeric/);
  });
});
