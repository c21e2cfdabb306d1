/**
 * CSV loading and schema validation for the simulation artifacts.
 *
 * Each figure kind declares the columns it needs; unknown columns are
 * ignored, missing ones are a hard error naming the offending column.
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class SchemaError extends Error {}
export class NoRowsError extends Error {
  constructor() {
    super("no rows");
  }
}

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export function loadCsv(path: string): Table {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`CSV parse error in ${path}: ${parsed.errors[0].message}`);
  }
  const columns = parsed.meta.fields ?? [];
  return { columns, rows: parsed.data };
}

export function requireColumns(table: Table, needed: string[]): void {
  for (const col of needed) {
    if (!table.columns.includes(col)) {
      throw new SchemaError(`missing column: ${col}`);
    }
  }
  if (table.rows.length === 0) {
    throw new NoRowsError();
  }
}

/** Numeric column; NaN entries (e.g. the overflow row's centers) pass through. */
export function numbers(table: Table, col: string): number[] {
  return table.rows.map((r) => Number(r[col]));
}
