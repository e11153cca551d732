/**
 * Markdown locking table: gradient error and observed order per mesh
 * size, one column pair per study of the stiffness sweep.  All studies
 * must share the same refinement levels.
 */

import { StudyRow } from "./csv.js";

export interface LabeledStudy {
  label: string;
  rows: StudyRow[];
}

export class LockingError extends Error {}

function fmtErr(v: number): string {
  return v.toExponential(3);
}

function fmtOrd(v: number): string {
  return Number.isNaN(v) ? "-" : v.toFixed(2);
}

export function renderLockingTable(studies: LabeledStudy[]): string {
  if (studies.length === 0) {
    throw new LockingError("no studies given");
  }
  const ref = studies[0].rows;
  if (ref.length === 0) {
    throw new LockingError(`${studies[0].label}: empty study`);
  }
  for (const s of studies) {
    if (
      s.rows.length !== ref.length ||
      s.rows.some((r, i) => r.n !== ref[i].n)
    ) {
      const levels = (rows: StudyRow[]) => rows.map((r) => r.n).join(",");
      throw new LockingError(
        `inconsistent level sets: ${studies[0].label} has n=${levels(ref)} ` +
          `but ${s.label} has n=${levels(s.rows)}`,
      );
    }
  }

  const header = ["h", ...studies.flatMap((s) => [`E (${s.label})`, "order"])];
  const align = [":---", ...studies.flatMap(() => ["---:", "---:"])];
  const lines = [`| ${header.join(" | ")} |`, `| ${align.join(" | ")} |`];
  for (let i = 0; i < ref.length; i++) {
    const cells = [ref[i].h.toPrecision(4)];
    for (const s of studies) {
      cells.push(fmtErr(s.rows[i].e_grad), fmtOrd(s.rows[i].ord_grad));
    }
    lines.push(`| ${cells.join(" | ")} |`);
  }
  return lines.join("\n") + "\n";
}
