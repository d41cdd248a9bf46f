import {
  HEIGHT,
  MARGIN,
  PALETTE,
  WIDTH,
  buildFrame,
  embeddedData,
  formatTick,
} from "./layout.js";
import { FigureModel } from "./model.js";

const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function px(value: number): string {
  return value.toFixed(2);
}

/** Deterministic standalone SVG; styling is fixed on purpose so output
 * files stay regression-comparable. */
export function renderSvg(model: FigureModel): string {
  const frame = buildFrame(model);
  const { xScale, yScale, plotLeft, plotRight, plotTop, plotBottom } = frame;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
  );
  parts.push(
    `<metadata id="beamplot-data">${esc(embeddedData(model))}</metadata>`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);
  parts.push(
    `<text x="${px(WIDTH / 2)}" y="28" text-anchor="middle" ${FONT} ` +
      `font-size="18">${esc(model.title)}</text>`,
  );

  // gridlines + ticks
  for (const t of xScale.ticks) {
    const x = px(xScale(t));
    parts.push(
      `<line x1="${x}" y1="${px(plotTop)}" x2="${x}" y2="${px(plotBottom)}" ` +
        `stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${x}" y="${px(plotBottom + 20)}" text-anchor="middle" ${FONT} ` +
        `font-size="12">${esc(formatTick(t, model.xTickDivisor ?? 1))}</text>`,
    );
  }
  for (const t of yScale.ticks) {
    const y = px(yScale(t));
    parts.push(
      `<line x1="${px(plotLeft)}" y1="${y}" x2="${px(plotRight)}" y2="${y}" ` +
        `stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${px(plotLeft - 8)}" y="${y}" text-anchor="end" ` +
        `dominant-baseline="middle" ${FONT} font-size="12">` +
        `${esc(formatTick(t))}</text>`,
    );
  }

  // axes
  parts.push(
    `<rect x="${px(plotLeft)}" y="${px(plotTop)}" width="${px(
      plotRight - plotLeft,
    )}" height="${px(plotBottom - plotTop)}" fill="none" stroke="#333333" ` +
      `stroke-width="1.5"/>`,
  );
  parts.push(
    `<text x="${px((plotLeft + plotRight) / 2)}" y="${px(
      HEIGHT - 18,
    )}" text-anchor="middle" ${FONT} font-size="14">${esc(model.xLabel)}</text>`,
  );
  parts.push(
    `<text x="22" y="${px((plotTop + plotBottom) / 2)}" text-anchor="middle" ` +
      `${FONT} font-size="14" transform="rotate(-90 22 ${px(
        (plotTop + plotBottom) / 2,
      )})">${esc(model.yLabel)}</text>`,
  );

  // series
  model.series.forEach((series, index) => {
    const color = PALETTE[index % PALETTE.length];
    const points = series.x
      .map((xv, i) => `${px(xScale(xv))},${px(yScale(series.y[i]))}`)
      .join(" ");
    parts.push(
      `<polyline points="${points}" fill="none" stroke="${color}" ` +
        `stroke-width="2"/>`,
    );
    if (series.ystd) {
      series.x.forEach((xv, i) => {
        const x = px(xScale(xv));
        const lo = px(yScale(series.y[i] - series.ystd![i]));
        const hi = px(yScale(series.y[i] + series.ystd![i]));
        parts.push(
          `<line x1="${x}" y1="${lo}" x2="${x}" y2="${hi}" stroke="${color}" ` +
            `stroke-width="1"/>`,
        );
      });
    }
    series.x.forEach((xv, i) => {
      parts.push(
        `<circle cx="${px(xScale(xv))}" cy="${px(yScale(series.y[i]))}" r="2.5" ` +
          `fill="${color}"/>`,
      );
    });
  });

  // legend
  const legendX = plotRight + 16;
  model.series.forEach((series, index) => {
    const color = PALETTE[index % PALETTE.length];
    const y = plotTop + 10 + index * 22;
    parts.push(
      `<line x1="${px(legendX)}" y1="${px(y)}" x2="${px(legendX + 26)}" ` +
        `y2="${px(y)}" stroke="${color}" stroke-width="3"/>`,
    );
    parts.push(
      `<text x="${px(legendX + 32)}" y="${px(y + 4)}" ${FONT} font-size="12">` +
        `${esc(series.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

/** Pull the verbatim plotted data back out of a rendered SVG. */
export function extractEmbeddedData(svg: string): {
  kind: string;
  xLabel: string;
  yLabel: string;
  series: { label: string; x: number[]; y: number[]; ystd?: number[] }[];
} {
  const match = svg.match(/<metadata id="beamplot-data">([\s\S]*?)<\/metadata>/);
  if (!match) {
    throw new Error("no beamplot metadata embedded in this SVG");
  }
  const text = match[1]
    .replace(/&lt;/g, "<")
    .replace(/&gt;/g, ">")
    .replace(/&quot;/g, '"')
    .replace(/&amp;/g, "&");
  return JSON.parse(text);
}
