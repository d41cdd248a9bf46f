import pngjs from "pngjs";

import { GLYPH_H, GLYPH_STRIDE, GLYPH_W, glyphFor, textWidth } from "./font.js";
import {
  HEIGHT,
  PALETTE,
  WIDTH,
  buildFrame,
  formatTick,
} from "./layout.js";
import { FigureModel } from "./model.js";

const { PNG } = pngjs;

type Rgb = [number, number, number];

function hexToRgb(hex: string): Rgb {
  return [
    parseInt(hex.slice(1, 3), 16),
    parseInt(hex.slice(3, 5), 16),
    parseInt(hex.slice(5, 7), 16),
  ];
}

class Canvas {
  data: Buffer;

  constructor(
    readonly width: number,
    readonly height: number,
  ) {
    this.data = Buffer.alloc(width * height * 4, 0xff);
  }

  set(x: number, y: number, [r, g, b]: Rgb): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 4;
    this.data[i] = r;
    this.data[i + 1] = g;
    this.data[i + 2] = b;
    this.data[i + 3] = 0xff;
  }

  dot(x: number, y: number, color: Rgb, size: number): void {
    const half = Math.floor(size / 2);
    for (let dy = -half; dy <= half; dy += 1) {
      for (let dx = -half; dx <= half; dx += 1) {
        this.set(x + dx, y + dy, color);
      }
    }
  }

  line(x0: number, y0: number, x1: number, y1: number, color: Rgb, thick = 1): void {
    // Bresenham with optional square brush
    let [xa, ya] = [Math.round(x0), Math.round(y0)];
    const [xb, yb] = [Math.round(x1), Math.round(y1)];
    const dx = Math.abs(xb - xa);
    const dy = -Math.abs(yb - ya);
    const sx = xa < xb ? 1 : -1;
    const sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      if (thick > 1) this.dot(xa, ya, color, thick);
      else this.set(xa, ya, color);
      if (xa === xb && ya === yb) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        xa += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ya += sy;
      }
    }
  }

  text(x: number, y: number, content: string, color: Rgb): void {
    let cx = Math.round(x);
    const cy = Math.round(y);
    for (const ch of content) {
      const glyph = glyphFor(ch);
      for (let row = 0; row < GLYPH_H; row += 1) {
        for (let col = 0; col < GLYPH_W; col += 1) {
          if (glyph[row] & (1 << (GLYPH_W - 1 - col))) {
            this.set(cx + col, cy + row, color);
          }
        }
      }
      cx += GLYPH_STRIDE;
    }
  }

  textCentered(x: number, y: number, content: string, color: Rgb): void {
    this.text(x - textWidth(content) / 2, y, content, color);
  }
}

const BLACK: Rgb = [0x22, 0x22, 0x22];
const GRID: Rgb = [0xdd, 0xdd, 0xdd];

/** Raster twin of the SVG renderer: same frame, same data, fixed styling. */
export function renderPng(model: FigureModel): Buffer {
  const { xScale, yScale, plotLeft, plotRight, plotTop, plotBottom } =
    buildFrame(model);
  const canvas = new Canvas(WIDTH, HEIGHT);

  for (const t of xScale.ticks) {
    const x = Math.round(xScale(t));
    canvas.line(x, plotTop, x, plotBottom, GRID);
    canvas.textCentered(
      x,
      plotBottom + 12,
      formatTick(t, model.xTickDivisor ?? 1),
      BLACK,
    );
  }
  for (const t of yScale.ticks) {
    const y = Math.round(yScale(t));
    canvas.line(plotLeft, y, plotRight, y, GRID);
    const label = formatTick(t);
    canvas.text(plotLeft - 10 - textWidth(label), y - 3, label, BLACK);
  }

  canvas.line(plotLeft, plotTop, plotRight, plotTop, BLACK);
  canvas.line(plotLeft, plotBottom, plotRight, plotBottom, BLACK);
  canvas.line(plotLeft, plotTop, plotLeft, plotBottom, BLACK);
  canvas.line(plotRight, plotTop, plotRight, plotBottom, BLACK);

  canvas.textCentered(WIDTH / 2, 16, model.title, BLACK);
  canvas.textCentered(
    (plotLeft + plotRight) / 2,
    HEIGHT - 24,
    model.xLabel,
    BLACK,
  );
  canvas.text(8, 12, model.yLabel, BLACK);

  model.series.forEach((series, index) => {
    const color = hexToRgb(PALETTE[index % PALETTE.length]);
    for (let i = 1; i < series.x.length; i += 1) {
      canvas.line(
        xScale(series.x[i - 1]),
        yScale(series.y[i - 1]),
        xScale(series.x[i]),
        yScale(series.y[i]),
        color,
        2,
      );
    }
    series.x.forEach((xv, i) => {
      canvas.dot(Math.round(xScale(xv)), Math.round(yScale(series.y[i])), color, 4);
      if (series.ystd) {
        canvas.line(
          xScale(xv),
          yScale(series.y[i] - series.ystd[i]),
          xScale(xv),
          yScale(series.y[i] + series.ystd[i]),
          color,
        );
      }
    });
    const ly = plotTop + 8 + index * 14;
    canvas.line(plotRight + 12, ly, plotRight + 34, ly, color, 2);
    canvas.text(plotRight + 40, ly - 3, series.label, BLACK);
  });

  const png = new PNG({ width: WIDTH, height: HEIGHT });
  canvas.data.copy(png.data);
  return PNG.sync.write(png, { deflateLevel: 6 });
}
