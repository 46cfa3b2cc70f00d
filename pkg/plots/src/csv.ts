/** CSV ingestion for the documented chirpecho output schemas. */

import { readFileSync } from "node:fs";

export interface Csv {
  path: string;
  header: string[];
  /** numeric rows, one array per line, column order as in the header */
  rows: number[][];
}

export class SchemaError extends Error {}

export function parseCsv(path: string, text: string): Csv {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${path}: file is empty`);
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== header.length) {
      throw new SchemaError(
        `${path}: line ${i + 1} has ${parts.length} fields, expected ${header.length}`,
      );
    }
    const row = parts.map((p) => Number(p));
    const bad = row.findIndex((v) => Number.isNaN(v));
    if (bad >= 0) {
      throw new SchemaError(
        `${path}: line ${i + 1}, column ${header[bad]}: not a number`,
      );
    }
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  return { path, header, rows };
}

export function readCsv(path: string): Csv {
  return parseCsv(path, readFileSync(path, "utf-8"));
}

export function column(csv: Csv, name: string): number[] {
  const i = csv.header.indexOf(name);
  if (i < 0) {
    throw new SchemaError(
      `${csv.path}: missing column ${name} (has: ${csv.header.join(", ")})`,
    );
  }
  return csv.rows.map((r) => r[i]);
}

export function requireColumns(csv: Csv, names: string[]): void {
  const missing = names.filter((n) => !csv.header.includes(n));
  if (missing.length > 0) {
    throw new SchemaError(
      `${csv.path}: schema mismatch, missing columns [${missing.join(", ")}]; ` +
        `found [${csv.header.join(", ")}]`,
    );
  }
}

export const SCHEMAS = {
  curves: ["L_km", "n_l_opt", "T_s_ms", "P_s_repeater", "P_direct", "ratio"],
  heatmap: ["T2_ms", "eta_o", "ratio"],
  trace: ["t_s", "intensity", "re_S", "im_S"],
  fit: ["t_s", "value"],
} as const;

export type FigureKind = keyof typeof SCHEMAS;

/**
 * Heatmap CSVs list the rectangular grid first, then any marker rows.
 * Returns the split so markers can be drawn as glyphs instead of cells.
 */
export function splitHeatmapGrid(csv: Csv): {
  grid: number[][];
  markers: number[][];
} {
  const rows = csv.rows;
  for (let k = 0; k <= Math.min(8, rows.length - 1); k++) {
    const grid = rows.slice(0, rows.length - k);
    const t2 = [...new Set(grid.map((r) => r[0]))];
    const eta = [...new Set(grid.map((r) => r[1]))];
    if (t2.length * eta.length === grid.length) {
      const seen = new Set(grid.map((r) => `${r[0]}|${r[1]}`));
      if (seen.size === grid.length) {
        return { grid, markers: rows.slice(rows.length - k) };
      }
    }
  }
  throw new SchemaError(
    `${csv.path}: rows do not form a rectangular (T2_ms, eta_o) grid`,
  );
}
