/**
 * Reader for the fixed convergence-study CSV schema produced by the
 * `ddrcontact convergence` command.  The pipeline is a read-only
 * consumer: it never recomputes errors, only parses and validates.
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export const CSV_COLUMNS = [
  "case", "family", "level", "n", "h", "n_cells", "n_dofs",
  "newton_iters", "e_u", "e_jump", "e_grad", "e_lambda_n",
  "ord_u", "ord_jump", "ord_grad", "ord_lambda_n",
] as const;

export const ERROR_COLUMNS = ["e_u", "e_jump", "e_grad", "e_lambda_n"] as const;
export type ErrorColumn = (typeof ERROR_COLUMNS)[number];

export interface StudyRow {
  case: string;
  family: string;
  level: number;
  n: number;
  h: number;
  n_cells: number;
  n_dofs: number;
  newton_iters: number;
  e_u: number;
  e_jump: number;
  e_grad: number;
  e_lambda_n: number;
  ord_u: number;
  ord_jump: number;
  ord_grad: number;
  ord_lambda_n: number;
}

export class CsvError extends Error {}

const INT_COLUMNS = new Set(["level", "n", "n_cells", "n_dofs", "newton_iters"]);
const STR_COLUMNS = new Set(["case", "family"]);

export function parseStudy(text: string, source = "<csv>"): StudyRow[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new CsvError(`${source}: ${e.message} (row ${e.row})`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const col of CSV_COLUMNS) {
    if (!fields.includes(col)) {
      throw new CsvError(`${source}: missing column '${col}'`);
    }
  }
  return parsed.data.map((raw, i) => {
    const row: Record<string, string | number> = {};
    for (const col of CSV_COLUMNS) {
      const cell = raw[col];
      if (cell === undefined || cell === "") {
        throw new CsvError(`${source}: row ${i + 1}: empty '${col}'`);
      }
      if (STR_COLUMNS.has(col)) {
        row[col] = cell;
      } else {
        const value = Number(cell);
        if (Number.isNaN(value) && cell.toLowerCase() !== "nan") {
          throw new CsvError(`${source}: row ${i + 1}: bad number '${cell}' in '${col}'`);
        }
        if (INT_COLUMNS.has(col) && !Number.isInteger(value)) {
          throw new CsvError(`${source}: row ${i + 1}: '${col}' must be an integer`);
        }
        row[col] = value;
      }
    }
    return row as unknown as StudyRow;
  });
}

export function readStudy(path: string): StudyRow[] {
  return parseStudy(readFileSync(path, "utf8"), path);
}

/** Group rows by mesh family, keeping first-seen order. */
export function byFamily(rows: StudyRow[]): Map<string, StudyRow[]> {
  const out = new Map<string, StudyRow[]>();
  for (const row of rows) {
    const list = out.get(row.family) ?? [];
    list.push(row);
    out.set(row.family, list);
  }
  for (const list of out.values()) {
    list.sort((a, b) => a.level - b.level);
  }
  return out;
}
