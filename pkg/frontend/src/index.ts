export { loadFigure } from "./csv.js";
export { figureFromFile, renderFile } from "./render.js";
export { renderPng } from "./raster.js";
export { extractEmbeddedData, renderSvg } from "./svg.js";
export {
  FIGURE_KINDS,
  type FigureKind,
  type FigureModel,
  SchemaError,
  type Series,
} from "./model.js";
