/**
 * Comparison figure: simulated trajectories as lines, experimental
 * points as markers, one shared time axis.
 *
 * The SVG is assembled by hand so the output is fully deterministic and
 * carries machine-checkable structure: the root element records the
 * series count and overall data ranges, and every series element
 * carries its label, kind, and min/max extents as data- attributes.
 */

import { writeFileSync } from "node:fs";

import { readColumnSeries, Series } from "./csv.js";
import { linearScale, logScale, Scale, tickLabel } from "./scale.js";

export type Observable = "ph" | "ca_molal";

export interface SeriesInput {
  path: string;
  label: string;
}

export interface PlotSpec {
  observable: Observable;
  simulations: SeriesInput[];
  experiment?: SeriesInput;
  out: string;
  logTime?: boolean;
  xRange?: [number, number];
  yRange?: [number, number];
  width?: number;
  height?: number;
}

const PALETTE = ["#1b6ca8", "#c23b22", "#2e8b57", "#8a5fbe", "#b8860b"];
const MARGIN = { top: 28, right: 24, bottom: 52, left: 72 };
const AXIS_TITLES: Record<Observable, string> = {
  ph: "pH",
  ca_molal: "Ca molality (mol/kg)",
};

function formatCoord(value: number): string {
  return Number(value.toFixed(2)).toString();
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

interface PlacedSeries extends Series {
  kind: "sim" | "exp";
  color: string;
}

export function loadSeries(spec: PlotSpec): PlacedSeries[] {
  if (spec.simulations.length === 0 && !spec.experiment) {
    throw new Error("at least one --sim or --exp input is required");
  }
  const placed: PlacedSeries[] = spec.simulations.map((input, i) => ({
    ...readColumnSeries(input.path, spec.observable, input.label),
    kind: "sim" as const,
    color: PALETTE[i % PALETTE.length]!,
  }));
  if (spec.experiment) {
    placed.push({
      ...readColumnSeries(spec.experiment.path, spec.observable, spec.experiment.label),
      kind: "exp",
      color: "#222222",
    });
  }
  return placed;
}

function seriesPath(series: Series, x: Scale, y: Scale, logTime: boolean): string {
  const parts: string[] = [];
  for (let i = 0; i < series.t.length; i++) {
    const t = series.t[i]!;
    if (logTime && t <= 0) continue; // log axis cannot show t = 0
    const cmd = parts.length === 0 ? "M" : "L";
    parts.push(`${cmd}${formatCoord(x(t))},${formatCoord(y(series.values[i]!))}`);
  }
  return parts.join(" ");
}

export function renderComparison(spec: PlotSpec): string {
  const width = spec.width ?? 720;
  const height = spec.height ?? 480;
  const series = loadSeries(spec);

  const allT = series.flatMap((s) => s.t.filter((t) => !spec.logTime || t > 0));
  const allV = series.flatMap((s) => s.values);
  const [tLo, tHi] = spec.xRange ?? extent(allT);
  const [vLo, vHi] = spec.yRange ?? extent(allV);
  const pad = (vHi - vLo || Math.abs(vHi) || 1) * 0.05;

  const plotX: [number, number] = [MARGIN.left, width - MARGIN.right];
  const plotY: [number, number] = [height - MARGIN.bottom, MARGIN.top];
  const x = spec.logTime
    ? logScale([Math.max(tLo, 1e-12), tHi], plotX)
    : linearScale([tLo, tHi], plotX);
  const y = linearScale([vLo - pad, vHi + pad], plotY);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif" ` +
      `data-series-count="${series.length}" data-observable="${spec.observable}" ` +
      `data-x-min="${tLo}" data-x-max="${tHi}" data-y-min="${vLo}" data-y-max="${vHi}">`
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);

  // axes
  const axis: string[] = [`<g class="axes" stroke="#444" fill="none">`];
  axis.push(
    `<line x1="${plotX[0]}" y1="${plotY[0]}" x2="${plotX[1]}" y2="${plotY[0]}"/>`,
    `<line x1="${plotX[0]}" y1="${plotY[0]}" x2="${plotX[0]}" y2="${plotY[1]}"/>`
  );
  for (const tick of x.ticks) {
    const px = formatCoord(x(tick));
    axis.push(`<line x1="${px}" y1="${plotY[0]}" x2="${px}" y2="${plotY[0] + 5}"/>`);
    axis.push(
      `<text x="${px}" y="${plotY[0] + 20}" fill="#444" stroke="none" ` +
        `text-anchor="middle" font-size="12">${tickLabel(tick)}</text>`
    );
  }
  for (const tick of y.ticks) {
    const py = formatCoord(y(tick));
    axis.push(`<line x1="${plotX[0] - 5}" y1="${py}" x2="${plotX[0]}" y2="${py}"/>`);
    axis.push(
      `<text x="${plotX[0] - 9}" y="${py}" fill="#444" stroke="none" ` +
        `text-anchor="end" dominant-baseline="middle" font-size="12">${tickLabel(tick)}</text>`
    );
  }
  axis.push(
    `<text x="${(plotX[0] + plotX[1]) / 2}" y="${height - 12}" fill="#222" ` +
      `stroke="none" text-anchor="middle" font-size="14">time (s)${
        spec.logTime ? ", log scale" : ""
      }</text>`
  );
  axis.push(
    `<text x="18" y="${(plotY[0] + plotY[1]) / 2}" fill="#222" stroke="none" ` +
      `text-anchor="middle" font-size="14" transform="rotate(-90 18 ${
        (plotY[0] + plotY[1]) / 2
      })">${AXIS_TITLES[spec.observable]}</text>`
  );
  axis.push(`</g>`);
  parts.push(axis.join(""));

  // data
  const data: string[] = [`<g class="series">`];
  for (const s of series) {
    const [sLoT, sHiT] = extent(s.t);
    const [sLoV, sHiV] = extent(s.values);
    const meta =
      `data-label="${s.label}" data-kind="${s.kind}" data-points="${s.t.length}" ` +
      `data-x-min="${sLoT}" data-x-max="${sHiT}" data-y-min="${sLoV}" data-y-max="${sHiV}"`;
    if (s.kind === "sim") {
      data.push(
        `<path class="series-line" ${meta} fill="none" stroke="${s.color}" ` +
          `stroke-width="2" d="${seriesPath(s, x, y, !!spec.logTime)}"/>`
      );
    } else {
      const markers = s.t
        .map((t, i) => {
          if (spec.logTime && t <= 0) return "";
          return (
            `<circle cx="${formatCoord(x(t))}" cy="${formatCoord(y(s.values[i]!))}" ` +
            `r="3.5" fill="${s.color}"/>`
          );
        })
        .join("");
      data.push(`<g class="series-markers" ${meta}>${markers}</g>`);
    }
  }
  data.push(`</g>`);
  parts.push(data.join(""));

  // legend, top right inside the plot area
  const legend: string[] = [`<g class="legend">`];
  series.forEach((s, i) => {
    const ly = MARGIN.top + 10 + i * 18;
    const lx = width - MARGIN.right - 170;
    if (s.kind === "sim") {
      legend.push(
        `<line x1="${lx}" y1="${ly}" x2="${lx + 22}" y2="${ly}" ` +
          `stroke="${s.color}" stroke-width="2"/>`
      );
    } else {
      legend.push(`<circle cx="${lx + 11}" cy="${ly}" r="3.5" fill="${s.color}"/>`);
    }
    legend.push(
      `<text class="legend-label" x="${lx + 28}" y="${ly}" fill="#222" ` +
        `dominant-baseline="middle" font-size="13">${s.label}</text>`
    );
  });
  legend.push(`</g>`);
  parts.push(legend.join(""));

  parts.push(`</svg>`);
  return parts.join("\n");
}

/** Render and write the figure; PNG output goes through a rasterizer. */
export async function writeComparison(spec: PlotSpec): Promise<string> {
  const svg = renderComparison(spec);
  if (spec.out.toLowerCase().endsWith(".png")) {
    const { default: sharp } = await import("sharp");
    await sharp(Buffer.from(svg)).png().toFile(spec.out);
  } else {
    writeFileSync(spec.out, svg + "\n", "utf8");
  }
  return svg;
}
