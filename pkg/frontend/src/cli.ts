#!/usr/bin/env node
/** beamplot <kind> --in <csv> --out <img>
 *
 * Exit codes: 0 success, 2 usage/schema/input error.
 */

import { FIGURE_KINDS, FigureKind, SchemaError } from "./model.js";
import { renderFile } from "./render.js";

const USAGE = `usage: beamplot <${FIGURE_KINDS.join("|")}> --in <csv> --out <img>`;

export function main(argv: string[]): number {
  const args = [...argv];
  const kind = args.shift();
  if (kind === "--help" || kind === "-h") {
    console.log(USAGE);
    return 0;
  }
  if (!kind || !FIGURE_KINDS.includes(kind as FigureKind)) {
    console.error(`unknown figure kind '${kind ?? ""}'\n${USAGE}`);
    return 2;
  }
  let input: string | undefined;
  let output: string | undefined;
  while (args.length > 0) {
    const flag = args.shift();
    if (flag === "--in") input = args.shift();
    else if (flag === "--out") output = args.shift();
    else {
      console.error(`unexpected argument '${flag}'\n${USAGE}`);
      return 2;
    }
  }
  if (!input || !output) {
    console.error(`--in and --out are both required\n${USAGE}`);
    return 2;
  }
  try {
    const paths = renderFile(kind as FigureKind, input, output);
    console.log(`wrote ${paths.svg} and ${paths.png}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
    } else if ((err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`file error: ${(err as Error).message}`);
    } else {
      console.error(`render failed: ${(err as Error).message}`);
    }
    return 2;
  }
}

const isDirectRun =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (isDirectRun) {
  process.exit(main(process.argv.slice(2)));
}
