/**
 * Reader for the lab's versioned CSV outputs.
 *
 * Every file starts with the schema comment line, then a header row, then
 * data rows. Anything else is rejected so figures never render from files
 * the primary component did not produce.
 */

import { readFileSync } from "node:fs";

export const SCHEMA_LINE = "# schema=1";

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string, path = "<memory>"): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${path}: empty file`);
  }
  if (lines[0] !== SCHEMA_LINE) {
    throw new SchemaError(`${path}: missing or unsupported schema header`);
  }
  if (lines.length < 2) {
    throw new SchemaError(`${path}: no header row`);
  }
  const columns = lines[1].split(",");
  const rows = lines.slice(2).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new SchemaError(`${path}: row ${i + 1} has ${cells.length} cells, expected ${columns.length}`);
    }
    const row: Record<string, string> = {};
    columns.forEach((col, j) => (row[col] = cells[j]));
    return row;
  });
  return { columns, rows };
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf8"), path);
}

/** Concatenate tables, insisting every file carries the same columns. */
export function readCsvAll(paths: string[]): Table {
  if (paths.length === 0) {
    throw new SchemaError("no input files given");
  }
  const tables = paths.map(readCsv);
  const columns = tables[0].columns;
  for (let i = 1; i < tables.length; i++) {
    if (tables[i].columns.join(",") !== columns.join(",")) {
      throw new SchemaError(`${paths[i]}: columns differ from ${paths[0]}`);
    }
  }
  return { columns, rows: tables.flatMap((t) => t.rows) };
}

export function requireColumns(table: Table, needed: string[], context: string): void {
  for (const col of needed) {
    if (!table.columns.includes(col)) {
      throw new SchemaError(`${context}: missing column '${col}' (have: ${table.columns.join(", ")})`);
    }
  }
}

export function numeric(table: Table, column: string): number[] {
  return table.rows.map((row, i) => {
    const value = Number(row[column]);
    if (!Number.isFinite(value)) {
      throw new SchemaError(`row ${i}: column '${column}' is not numeric: ${row[column]}`);
    }
    return value;
  });
}
