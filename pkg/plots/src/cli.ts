#!/usr/bin/env node
/** render <kind> <csv...> -o <file.svg>
 *
 * Renders one figure from chirpecho CSV outputs and writes a sidecar JSON
 * (<file>.json) listing every plotted series with the exact CSV values.
 */

import { writeFileSync } from "node:fs";
import { readCsv, SchemaError, SCHEMAS, FigureKind } from "./csv.js";
import { RENDERERS } from "./figures.js";

export function run(argv: string[]): number {
  const args = [...argv];
  if (args[0] === "render") {
    args.shift();
  }
  let out = "";
  const positional: string[] = [];
  for (let i = 0; i < args.length; i++) {
    if (args[i] === "-o" || args[i] === "--out") {
      out = args[++i] ?? "";
    } else if (args[i] === "-h" || args[i] === "--help") {
      console.log("usage: render <curves|heatmap|trace|fit> <csv...> -o <file.svg>");
      return 0;
    } else {
      positional.push(args[i]);
    }
  }
  const [kind, ...files] = positional;
  if (!kind || files.length === 0 || !out) {
    console.error("usage: render <curves|heatmap|trace|fit> <csv...> -o <file.svg>");
    return 2;
  }
  if (!(kind in SCHEMAS)) {
    console.error(`unknown figure kind '${kind}'; expected one of ${Object.keys(SCHEMAS).join(", ")}`);
    return 2;
  }
  try {
    const csvs = files.map(readCsv);
    const figure = RENDERERS[kind as FigureKind](csvs);
    writeFileSync(out, figure.svg, "utf-8");
    writeFileSync(out.replace(/\.svg$/, "") + ".json",
      JSON.stringify(figure.sidecar, null, 2) + "\n", "utf-8");
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    console.error(String(err));
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(run(process.argv.slice(2)));
}
