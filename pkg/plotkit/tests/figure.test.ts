import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { parseArgs, UsageError } from "../src/cli.js";
import { renderComparison, writeComparison } from "../src/figure.js";
import { linearScale, logScale } from "../src/scale.js";

const FIXTURES = join(__dirname, "..", "fixtures");

const BASE_SPEC = {
  observable: "ph" as const,
  simulations: [
    { path: join(FIXTURES, "batch_h2co3_activity.csv"), label: "corrected basis" },
    { path: join(FIXTURES, "batch_p_co2.csv"), label: "as published" },
  ],
  experiment: { path: join(FIXTURES, "run7_synthetic.csv"), label: "experiment" },
  out: "unused.svg",
};

describe("scales", () => {
  it("linear ticks are nice and inside the domain", () => {
    const scale = linearScale([0, 21572], [0, 100]);
    expect(scale.ticks[0]).toBeGreaterThanOrEqual(0);
    expect(scale.ticks.at(-1)).toBeLessThanOrEqual(21572);
    expect(scale(0)).toBe(0);
    expect(scale(21572)).toBe(100);
  });

  it("log ticks are decades", () => {
    const scale = logScale([3, 21572], [0, 100]);
    expect(scale.ticks).toEqual([10, 100, 1000, 10000]);
  });
});

describe("renderComparison", () => {
  it("draws every input with its own geometry and legend entry", () => {
    const svg = renderComparison(BASE_SPEC);
    expect(svg).toContain('data-series-count="3"');
    expect((svg.match(/class="series-line"/g) ?? []).length).toBe(2);
    expect((svg.match(/class="series-markers"/g) ?? []).length).toBe(1);
    for (const label of ["corrected basis", "as published", "experiment"]) {
      expect(svg).toContain(`>${label}</text>`);
    }
  });

  it("is deterministic", () => {
    expect(renderComparison(BASE_SPEC)).toBe(renderComparison(BASE_SPEC));
  });

  it("supports the calcium observable and a log time axis", () => {
    const svg = renderComparison({
      ...BASE_SPEC,
      observable: "ca_molal",
      logTime: true,
    });
    expect(svg).toContain('data-observable="ca_molal"');
    expect(svg).toContain("log scale");
  });

  it("rejects an empty input list", () => {
    expect(() =>
      renderComparison({ ...BASE_SPEC, simulations: [], experiment: undefined })
    ).toThrow(/at least one/);
  });

  it("writes PNG output through the rasterizer", async () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    const out = join(dir, "fig1.png");
    await writeComparison({ ...BASE_SPEC, out });
    const bytes = readFileSync(out);
    expect(bytes.subarray(0, 8)).toEqual(
      Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a])
    );
  });
});

describe("parseArgs", () => {
  it("parses the documented invocation shape", () => {
    const spec = parseArgs([
      "--obs", "ph",
      "--sim", "a.csv:corrected",
      "--sim", "b.csv:published",
      "--exp", "c.csv:experiment",
      "--out", "fig1.png",
      "--log-time",
    ]);
    expect(spec.simulations).toEqual([
      { path: "a.csv", label: "corrected" },
      { path: "b.csv", label: "published" },
    ]);
    expect(spec.experiment).toEqual({ path: "c.csv", label: "experiment" });
    expect(spec.logTime).toBe(true);
    expect(spec.out).toBe("fig1.png");
  });

  it("derives labels from file names when omitted", () => {
    const spec = parseArgs(["--obs", "ph", "--sim", "runs/batch_pwp.csv", "--out", "f.svg"]);
    expect(spec.simulations[0]).toEqual({
      path: "runs/batch_pwp.csv",
      label: "batch_pwp",
    });
  });

  it("rejects missing required flags and unknown arguments", () => {
    expect(() => parseArgs(["--obs", "ph"])).toThrow(UsageError);
    expect(() => parseArgs(["--out", "f.svg"])).toThrow(UsageError);
    expect(() => parseArgs(["--obs", "ph", "--out", "f.svg"])).toThrow(/at least one/);
    expect(() => parseArgs(["--frobnicate"])).toThrow(UsageError);
    expect(() => parseArgs(["--obs", "omega"])).toThrow(/ph/);
  });
});
