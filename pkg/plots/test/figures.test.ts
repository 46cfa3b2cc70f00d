import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { column, parseCsv, readCsv, splitHeatmapGrid, SchemaError } from "../src/csv.js";
import { renderCurves, renderFit, renderHeatmap, renderTrace } from "../src/figures.js";
import { run } from "../src/cli.js";

const golden = (name: string) => join(__dirname, "golden", name);

describe("csv parsing", () => {
  it("rejects empty files", () => {
    expect(() => parseCsv("x.csv", "")).toThrow(SchemaError);
    expect(() => parseCsv("x.csv", "a,b\n")).toThrow(/no data rows/);
  });

  it("reports bad fields with line and column", () => {
    expect(() => parseCsv("x.csv", "a,b\n1,2\n3,oops\n")).toThrow(/line 3/);
    expect(() => parseCsv("x.csv", "a,b\n1,2\n3,oops\n")).toThrow(/column b/);
  });

  it("reports schema mismatches with column names", () => {
    const csv = readCsv(golden("trace.csv"));
    expect(() => renderCurves([csv])).toThrow(/missing columns \[L_km/);
  });

  it("splits the heatmap grid from the marker rows", () => {
    const csv = readCsv(golden("heatmap_M60.csv"));
    const { grid, markers } = splitHeatmapGrid(csv);
    expect(grid.length).toBe(12); // 4 x 3 grid
    expect(markers.length).toBe(2); // star + triangle
    expect(markers[0][0]).toBeCloseTo(0.804, 9);
    expect(markers[0][1]).toBeCloseTo(0.2305, 9);
  });
});

describe("figure rendering", () => {
  it("renders distance curves with increment markers and a dashed benchmark", () => {
    const fig = renderCurves([
      readCsv(golden("analytic_M60.csv")),
      readCsv(golden("analytic_M200.csv")),
    ]);
    expect(fig.svg).toContain("<svg");
    expect(fig.svg).toContain("stroke-dasharray"); // direct transmission
    expect(fig.svg).toContain("<rect"); // n_l increment squares
    expect(fig.sidecar.series.map((s) => s.name)).toContain("P_direct");
  });

  it("renders the heatmap with star and triangle markers", () => {
    const fig = renderHeatmap([readCsv(golden("heatmap_M60.csv"))]);
    expect(fig.svg).toContain("<polygon"); // marker glyphs
    expect(fig.sidecar.series.some((s) => s.name === "markers")).toBe(true);
  });

  it("renders the emission trace", () => {
    const fig = renderTrace([readCsv(golden("trace.csv"))]);
    expect(fig.svg).toContain("<polyline");
    expect(fig.sidecar.series[0].x.length).toBeGreaterThan(1000);
  });

  it("renders fit points with the model overlay", () => {
    const fig = renderFit([
      readCsv(golden("fit_points.csv")),
      readCsv(golden("fit_curve.csv")),
    ]);
    expect(fig.svg).toContain("<circle");
    expect(fig.sidecar.series.map((s) => s.name)).toEqual(["points", "fit_curve"]);
  });

  it("is deterministic", () => {
    const render = () => renderTrace([readCsv(golden("trace.csv"))]).svg;
    expect(render()).toBe(render());
  });
});

describe("sidecar fidelity", () => {
  it("sidecar values equal the CSV values exactly (curves)", () => {
    const csv = readCsv(golden("analytic_M60.csv"));
    const fig = renderCurves([csv]);
    const s = fig.sidecar.series.find((x) => x.name.endsWith("P_s_repeater"))!;
    expect(s.x).toEqual(column(csv, "L_km"));
    expect(s.y).toEqual(column(csv, "P_s_repeater"));
    const d = fig.sidecar.series.find((x) => x.name === "P_direct")!;
    expect(d.y).toEqual(column(csv, "P_direct"));
  });

  it("sidecar values equal the CSV values exactly (heatmap, trace, fit)", () => {
    const hm = readCsv(golden("heatmap_M60.csv"));
    const { grid, markers } = splitHeatmapGrid(hm);
    const hmFig = renderHeatmap([hm]);
    expect(hmFig.sidecar.series[0].y).toEqual(grid.map((r) => r[2]));
    expect(hmFig.sidecar.series[2].x).toEqual(markers.map((r) => r[0]));

    const tr = readCsv(golden("trace.csv"));
    const trFig = renderTrace([tr]);
    expect(trFig.sidecar.series[0].x).toEqual(column(tr, "t_s"));
    expect(trFig.sidecar.series[0].y).toEqual(column(tr, "intensity"));

    const fp = readCsv(golden("fit_points.csv"));
    const fig = renderFit([fp]);
    expect(fig.sidecar.series[0].y).toEqual(column(fp, "value"));
  });

  it("JSON round-trip preserves every float bit", () => {
    const csv = readCsv(golden("analytic_M60.csv"));
    const fig = renderCurves([csv]);
    const back = JSON.parse(JSON.stringify(fig.sidecar));
    expect(back.series[0].y).toEqual(column(csv, "P_s_repeater"));
  });
});

describe("cli", () => {
  it("writes the svg and sidecar", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const out = join(dir, "fig.svg");
    const rc = run(["render", "curves", golden("analytic_M60.csv"), "-o", out]);
    expect(rc).toBe(0);
    expect(readFileSync(out, "utf-8")).toContain("<svg");
    const sidecar = JSON.parse(readFileSync(join(dir, "fig.json"), "utf-8"));
    expect(sidecar.kind).toBe("curves");
  });

  it("rejects unknown kinds and missing args with usage errors", () => {
    expect(run(["render", "pie", golden("trace.csv"), "-o", "x.svg"])).toBe(2);
    expect(run(["render", "trace"])).toBe(2);
  });

  it("reports schema mismatch as exit 2", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "a,b\n1,2\n");
    expect(run(["render", "trace", bad, "-o", join(dir, "o.svg")])).toBe(2);
  });

  it("reports empty csv as exit 2", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "");
    expect(run(["render", "trace", empty, "-o", join(dir, "o.svg")])).toBe(2);
  });
});
