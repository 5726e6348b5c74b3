#!/usr/bin/env node
/**
 * plot_comparison --obs ph --sim <csv:label>... [--exp <csv:label>]
 *                 --out fig1.svg [--log-time]
 *                 [--x-min N --x-max N --y-min N --y-max N]
 *                 [--width N --height N]
 *
 * Renders simulated trajectories (lines) and experimental data
 * (markers) from the engine's CSV outputs into one figure.  `.png`
 * output is rasterized; anything else is written as SVG.
 */

import { CsvError } from "./csv.js";
import { Observable, PlotSpec, SeriesInput, writeComparison } from "./figure.js";

export class UsageError extends Error {}

function splitPathLabel(raw: string): SeriesInput {
  const colon = raw.lastIndexOf(":");
  if (colon <= 0 || colon === raw.length - 1) {
    const stem = raw.split("/").pop() ?? raw;
    return { path: raw, label: stem.replace(/\.csv$/i, "") };
  }
  return { path: raw.slice(0, colon), label: raw.slice(colon + 1) };
}

export function parseArgs(argv: string[]): PlotSpec {
  const sims: SeriesInput[] = [];
  let experiment: SeriesInput | undefined;
  let observable: Observable | undefined;
  let out: string | undefined;
  let logTime = false;
  const numbers: Record<string, number> = {};

  const takeValue = (flag: string, i: number): string => {
    const value = argv[i + 1];
    if (value === undefined) throw new UsageError(`${flag} needs a value`);
    return value;
  };

  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i]!;
    switch (arg) {
      case "--obs": {
        const value = takeValue(arg, i++);
        if (value !== "ph" && value !== "ca_molal") {
          throw new UsageError(`--obs must be 'ph' or 'ca_molal', got '${value}'`);
        }
        observable = value;
        break;
      }
      case "--sim":
        sims.push(splitPathLabel(takeValue(arg, i++)));
        break;
      case "--exp":
        experiment = splitPathLabel(takeValue(arg, i++));
        break;
      case "--out":
        out = takeValue(arg, i++);
        break;
      case "--log-time":
        logTime = true;
        break;
      case "--x-min":
      case "--x-max":
      case "--y-min":
      case "--y-max":
      case "--width":
      case "--height": {
        const value = Number(takeValue(arg, i++));
        if (!Number.isFinite(value)) throw new UsageError(`${arg} must be a number`);
        numbers[arg] = value;
        break;
      }
      default:
        throw new UsageError(`unknown argument '${arg}'`);
    }
  }

  if (!observable) throw new UsageError("--obs is required");
  if (!out) throw new UsageError("--out is required");
  if (sims.length === 0 && !experiment) {
    throw new UsageError("at least one --sim or --exp input is required");
  }
  const range = (lo: string, hi: string): [number, number] | undefined =>
    numbers[lo] !== undefined && numbers[hi] !== undefined
      ? [numbers[lo]!, numbers[hi]!]
      : undefined;

  return {
    observable,
    simulations: sims,
    experiment,
    out,
    logTime,
    xRange: range("--x-min", "--x-max"),
    yRange: range("--y-min", "--y-max"),
    width: numbers["--width"],
    height: numbers["--height"],
  };
}

const USAGE =
  "usage: plot_comparison --obs {ph|ca_molal} --sim <csv[:label]>... " +
  "[--exp <csv[:label]>] --out <figure.{svg|png}> [--log-time]";

export async function main(argv: string[]): Promise<number> {
  let spec: PlotSpec;
  try {
    spec = parseArgs(argv);
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    console.error(USAGE);
    return 2;
  }
  try {
    await writeComparison(spec);
  } catch (error) {
    if (error instanceof CsvError || error instanceof Error) {
      console.error(`error: ${(error as Error).message}`);
      return 1;
    }
    throw error;
  }
  console.error(`wrote ${spec.out}`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
