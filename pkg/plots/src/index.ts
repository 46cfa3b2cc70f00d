export { parseCsv, readCsv, column, splitHeatmapGrid, SchemaError, SCHEMAS } from "./csv.js";
export type { Csv, FigureKind } from "./csv.js";
export { renderCurves, renderHeatmap, renderTrace, renderFit, RENDERERS } from "./figures.js";
export type { Figure, Series } from "./figures.js";
export { run } from "./cli.js";
