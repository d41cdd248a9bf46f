import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";
import zlib from "node:zlib";
import { describe, expect, it } from "vitest";

import { main } from "../src/cli.js";
import { loadFigure } from "../src/csv.js";
import { FIGURE_KINDS, FigureKind } from "../src/model.js";
import { renderPng } from "../src/raster.js";
import { renderFile } from "../src/render.js";
import { extractEmbeddedData, renderSvg } from "../src/svg.js";

const FIXTURES = path.join(__dirname, "fixtures");

function fixturePath(kind: FigureKind): string {
  return path.join(FIXTURES, `${kind}.csv`);
}

function csvColumn(file: string, column: string, where?: [string, string]): number[] {
  const lines = readFileSync(file, "utf8").trim().split(/\r?\n/);
  const header = lines[0].split(",");
  const idx = header.indexOf(column);
  const out: number[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (where && cells[header.indexOf(where[0])] !== where[1]) continue;
    out.push(Number(cells[idx]));
  }
  return out;
}

describe("renderSvg", () => {
  it.each(FIGURE_KINDS)("renders %s with the data embedded verbatim", (kind) => {
    const text = readFileSync(fixturePath(kind), "utf8");
    const model = loadFigure(kind, text);
    const svg = renderSvg(model);
    expect(svg).toContain("<svg");
    expect(svg).toContain("</svg>");
    const embedded = extractEmbeddedData(svg);
    expect(embedded.kind).toBe(kind);
    expect(embedded.series.length).toBe(model.series.length);
    embedded.series.forEach((s, i) => {
      expect(s.y).toEqual(model.series[i].y);
      expect(s.x).toEqual(model.series[i].x);
    });
  });

  it("embeds gain values that equal the CSV column exactly", () => {
    const file = fixturePath("gain_sweep");
    const svg = renderSvg(loadFigure("gain_sweep", readFileSync(file, "utf8")));
    const embedded = extractEmbeddedData(svg);
    for (const series of embedded.series) {
      const raw = csvColumn(file, "normalized_gain", ["plan_id", series.label]);
      expect(series.y).toEqual(raw);
    }
  });

  it("is deterministic", () => {
    const model = loadFigure(
      "rate_trace",
      readFileSync(fixturePath("rate_trace"), "utf8"),
    );
    expect(renderSvg(model)).toBe(renderSvg(model));
  });

  it("draws one polyline per series", () => {
    const model = loadFigure(
      "gain_sweep",
      readFileSync(fixturePath("gain_sweep"), "utf8"),
    );
    const svg = renderSvg(model);
    expect(svg.match(/<polyline/g)).toHaveLength(model.series.length);
  });
});

describe("renderPng", () => {
  it.each(FIGURE_KINDS)("produces a valid, deterministic PNG for %s", (kind) => {
    const model = loadFigure(kind, readFileSync(fixturePath(kind), "utf8"));
    const png = renderPng(model);
    // signature
    expect([...png.subarray(0, 8)]).toEqual([137, 80, 78, 71, 13, 10, 26, 10]);
    // IHDR dimensions
    expect(png.readUInt32BE(16)).toBe(960);
    expect(png.readUInt32BE(20)).toBe(600);
    expect(renderPng(model).equals(png)).toBe(true);
  });

  it("rasterizes full RGBA scanlines", () => {
    const model = loadFigure(
      "shape_objective",
      readFileSync(fixturePath("shape_objective"), "utf8"),
    );
    const png = renderPng(model);
    // walk chunks, inflate IDAT, check filtered scanline length
    let offset = 8;
    const idat: Buffer[] = [];
    while (offset < png.length) {
      const length = png.readUInt32BE(offset);
      const type = png.subarray(offset + 4, offset + 8).toString("ascii");
      if (type === "IDAT") {
        idat.push(png.subarray(offset + 8, offset + 8 + length));
      }
      offset += 12 + length;
    }
    const raw = zlib.inflateSync(Buffer.concat(idat));
    expect(raw.length).toBe(600 * (1 + 960 * 4));
  });
});

describe("renderFile + cli", () => {
  it("writes an svg/png pair next to the requested output", () => {
    const dir = mkdtempSync(path.join(tmpdir(), "beamplot-"));
    const out = path.join(dir, "fig.svg");
    const paths = renderFile("gain_sweep", fixturePath("gain_sweep"), out);
    expect(paths.svg.endsWith(".svg")).toBe(true);
    expect(paths.png.endsWith(".png")).toBe(true);
    expect(readFileSync(paths.svg, "utf8")).toContain("beamplot-data");
    expect(readFileSync(paths.png).length).toBeGreaterThan(1000);
  });

  it.each(FIGURE_KINDS)("cli renders %s from the primary fixtures", (kind) => {
    const dir = mkdtempSync(path.join(tmpdir(), "beamplot-"));
    const code = main([
      kind,
      "--in",
      fixturePath(kind),
      "--out",
      path.join(dir, `${kind}.png`),
    ]);
    expect(code).toBe(0);
    expect(readFileSync(path.join(dir, `${kind}.svg`), "utf8")).toContain("<svg");
  });

  it("exits 2 on unknown kind, missing flags, bad input, schema mismatch", () => {
    const dir = mkdtempSync(path.join(tmpdir(), "beamplot-"));
    expect(main(["nope"])).toBe(2);
    expect(main(["gain_sweep", "--in", fixturePath("gain_sweep")])).toBe(2);
    expect(
      main([
        "gain_sweep",
        "--in",
        path.join(dir, "missing.csv"),
        "--out",
        path.join(dir, "x.svg"),
      ]),
    ).toBe(2);
    expect(
      main([
        "gain_sweep",
        "--in",
        fixturePath("rate_trace"),
        "--out",
        path.join(dir, "x.svg"),
      ]),
    ).toBe(2);
  });
});
