import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import path from "node:path";

import { loadFigure } from "./csv.js";
import { FigureKind, FigureModel } from "./model.js";
import { renderPng } from "./raster.js";
import { renderSvg } from "./svg.js";

export interface RenderedPaths {
  svg: string;
  png: string;
}

export function figureFromFile(kind: FigureKind, csvPath: string): FigureModel {
  return loadFigure(kind, readFileSync(csvPath, "utf8"));
}

/** Render one CSV to a sibling SVG + PNG pair derived from `outPath`. */
export function renderFile(
  kind: FigureKind,
  csvPath: string,
  outPath: string,
): RenderedPaths {
  const model = figureFromFile(kind, csvPath);
  const ext = path.extname(outPath).toLowerCase();
  const base =
    ext === ".svg" || ext === ".png"
      ? outPath.slice(0, -ext.length)
      : outPath;
  const paths = { svg: `${base}.svg`, png: `${base}.png` };
  mkdirSync(path.dirname(path.resolve(base)), { recursive: true });
  writeFileSync(paths.svg, renderSvg(model));
  writeFileSync(paths.png, renderPng(model));
  return paths;
}
