/**
 * Acceptance: one figure from the engine's paired batch outputs plus the
 * experimental fixture, checked structurally (series count, legend
 * entries, axis data ranges).
 */

import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { readColumnSeries } from "../src/csv.js";
import { main } from "../src/cli.js";

const FIXTURES = join(__dirname, "..", "fixtures");
const SIM_CORRECTED = join(FIXTURES, "batch_h2co3_activity.csv");
const SIM_PUBLISHED = join(FIXTURES, "batch_p_co2.csv");
const EXPERIMENT = join(FIXTURES, "run7_synthetic.csv");

function attr(svg: string, name: string, context = "<svg"): number {
  const index = svg.indexOf(context);
  const match = svg.slice(index).match(new RegExp(`${name}="([^"]+)"`));
  if (!match) throw new Error(`attribute ${name} not found near ${context}`);
  return Number(match[1]);
}

describe("criterion 12: comparison figure from the paired batch runs", () => {
  it("renders both simulated curves and the experimental points", async () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-acc-"));
    const out = join(dir, "fig1.svg");
    const code = await main([
      "--obs", "ph",
      "--sim", `${SIM_CORRECTED}:corrected basis`,
      "--sim", `${SIM_PUBLISHED}:as published`,
      "--exp", `${EXPERIMENT}:experiment`,
      "--out", out,
    ]);
    expect(code).toBe(0);
    const svg = readFileSync(out, "utf8");

    // structure: 3 series (2 lines + 1 marker group), 3 legend entries
    expect(attr(svg, "data-series-count")).toBe(3);
    expect((svg.match(/class="series-line"/g) ?? []).length).toBe(2);
    expect((svg.match(/class="series-markers"/g) ?? []).length).toBe(1);
    const legendLabels = [...svg.matchAll(/class="legend-label"[^>]*>([^<]+)</g)].map(
      (m) => m[1]
    );
    expect(legendLabels).toEqual(["corrected basis", "as published", "experiment"]);

    // axis data ranges match the inputs recomputed independently
    const columns = [
      readColumnSeries(SIM_CORRECTED, "ph", "a"),
      readColumnSeries(SIM_PUBLISHED, "ph", "b"),
      readColumnSeries(EXPERIMENT, "ph", "c"),
    ];
    const allT = columns.flatMap((s) => s.t);
    const allV = columns.flatMap((s) => s.values);
    expect(attr(svg, "data-x-min")).toBeCloseTo(Math.min(...allT), 9);
    expect(attr(svg, "data-x-max")).toBeCloseTo(Math.max(...allT), 9);
    expect(attr(svg, "data-y-min")).toBeCloseTo(Math.min(...allV), 9);
    expect(attr(svg, "data-y-max")).toBeCloseTo(Math.max(...allV), 9);

    // per-series extents recorded on each element
    for (const [path, label] of [
      [SIM_CORRECTED, "corrected basis"],
      [SIM_PUBLISHED, "as published"],
    ] as const) {
      const series = readColumnSeries(path, "ph", label);
      const block = svg.slice(svg.indexOf(`data-label="${label}"`));
      expect(attr(block, "data-points", "data-label")).toBe(series.t.length);
      expect(attr(block, "data-y-max", "data-label")).toBeCloseTo(
        Math.max(...series.values),
        9
      );
    }
  });

  it("the published-basis curve saturates much earlier on the shared axis", () => {
    // the figure's underlying data must carry the timescale story:
    // the corrected run needs far longer to flatten than the published one
    const corrected = readColumnSeries(SIM_CORRECTED, "ca_molal", "corrected");
    const published = readColumnSeries(SIM_PUBLISHED, "ca_molal", "published");
    const riseTime = (s: { t: number[]; values: number[] }) => {
      const target = 0.99 * s.values[s.values.length - 1]!;
      const i = s.values.findIndex((v) => v >= target);
      return s.t[i]!;
    };
    const ratio = riseTime(corrected) / riseTime(published);
    expect(ratio).toBeGreaterThan(10);
    expect(ratio).toBeLessThan(40);
  });

  it("empty input list is a usage error", async () => {
    const code = await main(["--obs", "ph", "--out", "x.svg"]);
    expect(code).toBe(2);
  });
});
