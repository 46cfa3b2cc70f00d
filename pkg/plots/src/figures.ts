/** The four figure kinds, rendered straight from the documented CSVs.
 *
 * No science happens here: values are taken from the files as-is and only
 * axis transforms (linear/log mapping) are applied. The sidecar reports the
 * exact numbers that were drawn.
 */

import { basename } from "node:path";
import {
  Csv,
  FigureKind,
  SCHEMAS,
  SchemaError,
  column,
  requireColumns,
  splitHeatmapGrid,
} from "./csv.js";
import * as svg from "./svg.js";

export interface Series {
  name: string;
  x: number[];
  y: number[];
}

export interface Figure {
  svg: string;
  sidecar: {
    kind: FigureKind;
    sources: string[];
    series: Series[];
  };
}

const WIDTH = 720;
const HEIGHT = 480;
const BOX: svg.Box = { x: 70, y: 30, width: 600, height: 380 };
const PALETTE = ["#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const DIRECT_COLOR = "#e377c2";

function finitePositive(values: number[]): number[] {
  return values.filter((v) => Number.isFinite(v) && v > 0);
}

export function renderCurves(csvs: Csv[]): Figure {
  csvs.forEach((c) => requireColumns(c, [...SCHEMAS.curves]));
  const series: Series[] = [];
  const body: string[] = [];

  const allX = csvs.flatMap((c) => column(c, "L_km"));
  const allP = csvs.flatMap((c) =>
    finitePositive([...column(c, "P_s_repeater"), ...column(c, "P_direct")]),
  );
  if (allP.length === 0) {
    throw new SchemaError("curves: no positive probabilities to draw");
  }
  const xS = svg.linearScale(Math.min(...allX), Math.max(...allX), BOX.x, BOX.x + BOX.width);
  const yS = svg.logScale(Math.min(...allP), Math.max(...allP),
    BOX.y + BOX.height, BOX.y);

  csvs.forEach((csv, i) => {
    const name = basename(csv.path).replace(/\.csv$/, "");
    const x = column(csv, "L_km");
    const p = column(csv, "P_s_repeater");
    const n = column(csv, "n_l_opt");
    const color = PALETTE[i % PALETTE.length];
    const px = x.map(xS);
    const py = p.map((v) => (v > 0 ? yS(v) : NaN));
    body.push(svg.polyline(px, py, color));
    // squares mark each increment of the optimal link count
    for (let k = 1; k < n.length; k++) {
      if (n[k] > n[k - 1] && p[k] > 0) {
        body.push(svg.square(px[k], py[k], 7, color));
      }
    }
    body.push(svg.text(BOX.x + 10, BOX.y + 16 + 16 * i, name, "start", 11,
      ` fill="${color}"`));
    series.push({ name: `${name}:P_s_repeater`, x, y: p });
  });

  const first = csvs[0];
  const dx = column(first, "L_km");
  const dp = column(first, "P_direct");
  body.push(svg.polyline(dx.map(xS), dp.map((v) => (v > 0 ? yS(v) : NaN)),
    DIRECT_COLOR, "6 4"));
  body.push(svg.text(BOX.x + 10, BOX.y + 16 + 16 * csvs.length,
    "direct transmission", "start", 11, ` fill="${DIRECT_COLOR}"`));
  series.push({ name: "P_direct", x: dx, y: dp });

  body.push(svg.axes(BOX, xS, yS, "distance (km)", "success probability", true));
  return {
    svg: svg.document(WIDTH, HEIGHT, body.join("\n")),
    sidecar: { kind: "curves", sources: csvs.map((c) => basename(c.path)), series },
  };
}

/** Diverging colour for log10(ratio): blue below break-even, red above. */
function ratioColor(logR: number, lo: number, hi: number): string {
  const t = Math.max(-1, Math.min(1, logR < 0 ? -logR / Math.max(1e-12, -lo) : logR / Math.max(1e-12, hi)));
  const mix = (a: number, b: number) => Math.round(a + (b - a) * Math.abs(t));
  if (logR < 0) {
    return `rgb(${mix(247, 33)},${mix(247, 102)},${mix(247, 172)})`;
  }
  return `rgb(${mix(247, 178)},${mix(247, 24)},${mix(247, 43)})`;
}

export function renderHeatmap(csvs: Csv[]): Figure {
  const csv = csvs[0];
  requireColumns(csv, [...SCHEMAS.heatmap]);
  const { grid, markers } = splitHeatmapGrid(csv);
  const t2s = [...new Set(grid.map((r) => r[0]))].sort((a, b) => a - b);
  const etas = [...new Set(grid.map((r) => r[1]))].sort((a, b) => a - b);

  const xS = svg.linearScale(t2s[0], t2s[t2s.length - 1], BOX.x, BOX.x + BOX.width);
  const yS = svg.linearScale(etas[0], etas[etas.length - 1],
    BOX.y + BOX.height, BOX.y);
  const cellW = BOX.width / Math.max(1, t2s.length - 1);
  const cellH = BOX.height / Math.max(1, etas.length - 1);

  const logs = grid.map((r) => (r[2] > 0 ? Math.log10(r[2]) : NaN))
    .filter((v) => Number.isFinite(v));
  const lo = Math.min(...logs, -1);
  const hi = Math.max(...logs, 1);

  const body: string[] = [];
  for (const row of grid) {
    const [t2, eta, ratio] = row;
    const logR = ratio > 0 ? Math.log10(ratio) : lo;
    body.push(svg.rect(xS(t2) - cellW / 2, yS(eta) - cellH / 2, cellW, cellH,
      ratioColor(logR, lo, hi)));
  }
  // break-even contour cue: outline cells that beat direct transmission
  for (const row of grid) {
    if (row[2] > 1) {
      body.push(
        `<rect x="${(xS(row[0]) - cellW / 2).toFixed(2)}" y="${(yS(row[1]) - cellH / 2).toFixed(2)}" width="${cellW.toFixed(2)}" height="${cellH.toFixed(2)}" fill="none" stroke="#333" stroke-width="0.4"/>`,
      );
    }
  }
  markers.forEach((row, i) => {
    const [t2, eta] = row;
    body.push(i === 0 ? svg.star(xS(t2), yS(eta), 9, "#ffd700")
      : svg.triangle(xS(t2), yS(eta), 8, "#00c49a"));
  });
  body.push(svg.axes(BOX, xS, yS, "T2 (ms)", "zero-time efficiency"));

  const series: Series[] = [
    { name: "grid:ratio", x: grid.map((r) => r[0]), y: grid.map((r) => r[2]) },
    { name: "grid:eta_o", x: grid.map((r) => r[0]), y: grid.map((r) => r[1]) },
  ];
  if (markers.length > 0) {
    series.push({ name: "markers", x: markers.map((r) => r[0]),
      y: markers.map((r) => r[1]) });
  }
  return {
    svg: svg.document(WIDTH, HEIGHT, body.join("\n")),
    sidecar: { kind: "heatmap", sources: [basename(csv.path)], series },
  };
}

export function renderTrace(csvs: Csv[]): Figure {
  const csv = csvs[0];
  requireColumns(csv, [...SCHEMAS.trace]);
  const t = column(csv, "t_s");
  const inten = column(csv, "intensity");
  const xS = svg.linearScale(t[0] * 1e6, t[t.length - 1] * 1e6, BOX.x,
    BOX.x + BOX.width);
  const top = Math.max(...inten);
  const yS = svg.linearScale(0, top > 0 ? top : 1, BOX.y + BOX.height, BOX.y);
  const body = [
    svg.polyline(t.map((v) => xS(v * 1e6)), inten.map(yS), PALETTE[0], "", 1),
    svg.axes(BOX, xS, yS, "time (us)", "|S(t)|^2"),
  ];
  return {
    svg: svg.document(WIDTH, HEIGHT, body.join("\n")),
    sidecar: {
      kind: "trace",
      sources: [basename(csv.path)],
      series: [{ name: "intensity", x: t, y: inten }],
    },
  };
}

export function renderFit(csvs: Csv[]): Figure {
  // first file: measured points; optional second file: fitted model curve
  const [points, curve] = csvs;
  requireColumns(points, [...SCHEMAS.fit]);
  const px = column(points, "t_s");
  const py = column(points, "value");
  let cx: number[] = [];
  let cy: number[] = [];
  if (curve) {
    requireColumns(curve, [...SCHEMAS.fit]);
    cx = column(curve, "t_s");
    cy = column(curve, "value");
  }
  const ally = finitePositive([...py, ...cy]);
  if (ally.length === 0) {
    throw new SchemaError("fit: no positive values to draw");
  }
  const xAll = [...px, ...cx];
  const xS = svg.linearScale(Math.min(...xAll) * 1e6, Math.max(...xAll) * 1e6,
    BOX.x, BOX.x + BOX.width);
  const yS = svg.logScale(Math.min(...ally), Math.max(...ally),
    BOX.y + BOX.height, BOX.y);
  const body: string[] = [];
  if (cx.length > 0) {
    body.push(svg.polyline(cx.map((v) => xS(v * 1e6)),
      cy.map((v) => (v > 0 ? yS(v) : NaN)), PALETTE[1]));
  }
  for (let i = 0; i < px.length; i++) {
    if (py[i] > 0) {
      body.push(`<circle cx="${xS(px[i] * 1e6).toFixed(2)}" cy="${yS(py[i]).toFixed(2)}" r="4" fill="${PALETTE[0]}"/>`);
    }
  }
  body.push(svg.axes(BOX, xS, yS, "time (us)", "value", true));
  const series: Series[] = [{ name: "points", x: px, y: py }];
  if (cx.length > 0) {
    series.push({ name: "fit_curve", x: cx, y: cy });
  }
  return {
    svg: svg.document(WIDTH, HEIGHT, body.join("\n")),
    sidecar: { kind: "fit", sources: csvs.map((c) => basename(c.path)), series },
  };
}

export const RENDERERS: Record<FigureKind, (csvs: Csv[]) => Figure> = {
  curves: renderCurves,
  heatmap: renderHeatmap,
  trace: renderTrace,
  fit: renderFit,
};
