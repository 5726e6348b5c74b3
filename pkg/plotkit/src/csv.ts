/**
 * Strict readers for the engine's CSV contracts.
 *
 * Both the simulated trajectory files (header
 * `t_s,mineral_mol,ca_molal,ph,a_h2co3,omega,rate_mol_s`) and
 * experimental records (`t_s` plus any of `ph`, `ca_molal`) reduce here
 * to one (t, value) series per requested observable.  Lines starting
 * with `#` are comments; blank cells are missing observations and the
 * row is skipped for that observable.
 */

import { readFileSync } from "node:fs";

export interface Series {
  label: string;
  /** source file, for error messages and provenance */
  path: string;
  t: number[];
  values: number[];
}

export class CsvError extends Error {}

function parseNumber(cell: string, path: string, line: number): number {
  const value = Number(cell);
  if (cell.trim() === "" || !Number.isFinite(value)) {
    throw new CsvError(`${path}:${line}: malformed number ${JSON.stringify(cell)}`);
  }
  return value;
}

/** Extract one observable column against t_s from a CSV file. */
export function readColumnSeries(
  path: string,
  column: string,
  label: string
): Series {
  const text = readFileSync(path, "utf8");
  const rows: { line: number; cells: string[] }[] = [];
  text.split(/\r?\n/).forEach((raw, index) => {
    const line = raw.trim();
    if (line === "" || line.startsWith("#")) return;
    rows.push({ line: index + 1, cells: line.split(",").map((c) => c.trim()) });
  });
  if (rows.length === 0) {
    throw new CsvError(`${path}: empty file`);
  }
  const header = rows[0]!.cells;
  if (header[0] !== "t_s") {
    throw new CsvError(`${path}: first column must be 't_s', got '${header[0]}'`);
  }
  const columnIndex = header.indexOf(column);
  if (columnIndex < 0) {
    throw new CsvError(
      `${path}: missing column '${column}' (found: ${header.join(", ")})`
    );
  }

  const t: number[] = [];
  const values: number[] = [];
  for (const row of rows.slice(1)) {
    if (row.cells.length !== header.length) {
      throw new CsvError(
        `${path}:${row.line}: expected ${header.length} fields, got ${row.cells.length}`
      );
    }
    const cell = row.cells[columnIndex]!;
    if (cell === "") continue; // missing observation
    const time = parseNumber(row.cells[0]!, path, row.line);
    if (t.length > 0 && time <= t[t.length - 1]!) {
      throw new CsvError(`${path}:${row.line}: time ${time} not increasing`);
    }
    t.push(time);
    values.push(parseNumber(cell, path, row.line));
  }
  if (t.length === 0) {
    throw new CsvError(`${path}: no usable rows for column '${column}'`);
  }
  return { label, path, t, values };
}
