// Minimal SVG chart builders; all drawing uses raw payload numbers.

import { svg } from "./dom";

export interface XY {
  x: number;
  y: number;
}

function extent(values: number[]): [number, number] {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  return lo === hi ? [lo - 1, hi + 1] : [lo, hi];
}

export function scaleInto(values: number[], outLo: number, outHi: number): number[] {
  const [lo, hi] = extent(values);
  return values.map((v) => outLo + ((v - lo) / (hi - lo)) * (outHi - outLo));
}

export function lineChart(points: XY[], width = 360, height = 120): SVGElement {
  const root = svg("svg", { viewBox: `0 0 ${width} ${height}`, class: "chart line-chart" });
  if (!points.length) return root;
  const xs = scaleInto(points.map((p) => p.x), 8, width - 8);
  const ys = scaleInto(points.map((p) => p.y), height - 8, 8);
  const path = points.map((_, i) => `${i === 0 ? "M" : "L"}${xs[i]},${ys[i]}`).join(" ");
  root.append(svg("path", { d: path, fill: "none", stroke: "#2563eb", "stroke-width": "2" }));
  points.forEach((_, i) => {
    root.append(svg("circle", { cx: String(xs[i]), cy: String(ys[i]), r: "2.5",
                                fill: "#2563eb" }));
  });
  return root;
}

export function barChart(labels: string[], values: number[], width = 360,
                         barHeight = 16): SVGElement {
  const height = labels.length * (barHeight + 4) + 4;
  const root = svg("svg", { viewBox: `0 0 ${width} ${height}`, class: "chart bar-chart" });
  const max = Math.max(...values, 1e-12);
  labels.forEach((label, i) => {
    const y = 4 + i * (barHeight + 4);
    const w = (values[i] / max) * (width - 140);
    root.append(svg("rect", { x: "120", y: String(y), width: String(Math.max(w, 1)),
                              height: String(barHeight), fill: "#60a5fa" }));
    root.append(svg("text", { x: "116", y: String(y + barHeight - 4),
                              "text-anchor": "end", class: "bar-label" }, label));
    root.append(svg("text", { x: String(124 + Math.max(w, 1)), y: String(y + barHeight - 4),
                              class: "bar-value" }, values[i].toPrecision(3)));
  });
  return root;
}

export interface ScatterPoint extends XY {
  r: number;
  color?: string;
  title?: string;
}

export function scatterChart(points: ScatterPoint[], width = 360, height = 180): SVGElement {
  const root = svg("svg", { viewBox: `0 0 ${width} ${height}`, class: "chart scatter-chart" });
  if (!points.length) return root;
  const xs = scaleInto(points.map((p) => p.x), 12, width - 12);
  const ys = scaleInto(points.map((p) => p.y), height - 12, 12);
  points.forEach((p, i) => {
    const circle = svg("circle", {
      cx: String(xs[i]), cy: String(ys[i]),
      r: String(Math.max(2, Math.min(14, p.r))),
      fill: p.color ?? "#2563eb", "fill-opacity": "0.65",
    });
    if (p.title) circle.append(svg("title", {}, p.title));
    root.append(circle);
  });
  return root;
}
