/** Minimal deterministic SVG primitives: scales, axes, paths. */

export interface Box {
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface Scale {
  (v: number): number;
  ticks(): number[];
  domain: [number, number];
}

const fmtNum = (v: number): string => {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0).replace("+", "");
  return String(Number(v.toPrecision(6)));
};

export function linearScale(
  lo: number,
  hi: number,
  rLo: number,
  rHi: number,
): Scale {
  if (hi === lo) {
    hi = lo + 1;
  }
  const f = ((v: number) => rLo + ((v - lo) / (hi - lo)) * (rHi - rLo)) as Scale;
  f.domain = [lo, hi];
  f.ticks = () => {
    const span = hi - lo;
    const step = Math.pow(10, Math.floor(Math.log10(span / 5)));
    const err = span / 5 / step;
    const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
    const s = step * mult;
    const out: number[] = [];
    for (let t = Math.ceil(lo / s) * s; t <= hi + s * 1e-9; t += s) {
      out.push(Number(t.toPrecision(12)));
    }
    return out;
  };
  return f;
}

export function logScale(
  lo: number,
  hi: number,
  rLo: number,
  rHi: number,
): Scale {
  if (lo <= 0 || hi <= 0) {
    throw new Error(`log scale needs positive bounds, got [${lo}, ${hi}]`);
  }
  const la = Math.log10(lo);
  const lb = Math.log10(hi);
  const f = ((v: number) =>
    rLo + ((Math.log10(v) - la) / (lb - la || 1)) * (rHi - rLo)) as Scale;
  f.domain = [lo, hi];
  f.ticks = () => {
    const out: number[] = [];
    const step = Math.max(1, Math.round((Math.ceil(lb) - Math.floor(la)) / 10));
    for (let e = Math.ceil(la); e <= Math.floor(lb); e += step) {
      out.push(Math.pow(10, e));
    }
    return out;
  };
  return f;
}

export const esc = (s: string): string =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");

const P = (v: number): string => String(Number(v.toFixed(2)));

export function polyline(
  xs: number[],
  ys: number[],
  stroke: string,
  dash = "",
  width = 1.5,
): string {
  const pts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    if (!Number.isFinite(xs[i]) || !Number.isFinite(ys[i])) continue;
    pts.push(`${P(xs[i])},${P(ys[i])}`);
  }
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline fill="none" stroke="${stroke}" stroke-width="${width}"${dashAttr} points="${pts.join(" ")}"/>`;
}

export function rect(
  x: number,
  y: number,
  w: number,
  h: number,
  fill: string,
): string {
  return `<rect x="${P(x)}" y="${P(y)}" width="${P(w)}" height="${P(h)}" fill="${fill}"/>`;
}

export function text(
  x: number,
  y: number,
  s: string,
  anchor = "middle",
  size = 11,
  extra = "",
): string {
  return `<text x="${P(x)}" y="${P(y)}" text-anchor="${anchor}" font-size="${size}" font-family="sans-serif"${extra}>${esc(s)}</text>`;
}

export function square(x: number, y: number, size: number, fill: string): string {
  const h = size / 2;
  return rect(x - h, y - h, size, size, fill);
}

export function star(x: number, y: number, r: number, fill: string): string {
  const pts: string[] = [];
  for (let i = 0; i < 10; i++) {
    const rad = i % 2 === 0 ? r : r * 0.45;
    const a = -Math.PI / 2 + (i * Math.PI) / 5;
    pts.push(`${P(x + rad * Math.cos(a))},${P(y + rad * Math.sin(a))}`);
  }
  return `<polygon points="${pts.join(" ")}" fill="${fill}" stroke="black" stroke-width="0.8"/>`;
}

export function triangle(x: number, y: number, r: number, fill: string): string {
  const pts = [0, 1, 2].map((i) => {
    const a = -Math.PI / 2 + (i * 2 * Math.PI) / 3;
    return `${P(x + r * Math.cos(a))},${P(y + r * Math.sin(a))}`;
  });
  return `<polygon points="${pts.join(" ")}" fill="${fill}" stroke="black" stroke-width="0.8"/>`;
}

/** Frame, tick marks and labels around a plot box. */
export function axes(
  box: Box,
  xScale: Scale,
  yScale: Scale,
  xLabel: string,
  yLabel: string,
  yLog = false,
): string {
  const out: string[] = [];
  out.push(
    `<rect x="${P(box.x)}" y="${P(box.y)}" width="${P(box.width)}" height="${P(box.height)}" fill="none" stroke="black" stroke-width="1"/>`,
  );
  for (const t of xScale.ticks()) {
    const x = xScale(t);
    out.push(polyline([x, x], [box.y + box.height, box.y + box.height + 5], "black", "", 1));
    out.push(text(x, box.y + box.height + 18, fmtNum(t)));
  }
  for (const t of yScale.ticks()) {
    const y = yScale(t);
    out.push(polyline([box.x - 5, box.x], [y, y], "black", "", 1));
    const label = yLog ? `1e${Math.round(Math.log10(t))}` : fmtNum(t);
    out.push(text(box.x - 8, y + 4, label, "end"));
  }
  out.push(text(box.x + box.width / 2, box.y + box.height + 36, xLabel));
  out.push(
    text(0, 0, yLabel, "middle", 11,
      ` transform="translate(${P(box.x - 48)},${P(box.y + box.height / 2)}) rotate(-90)"`),
  );
  return out.join("\n");
}

export function document(width: number, height: number, body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    body,
    `</svg>`,
    ``,
  ].join("\n");
}
