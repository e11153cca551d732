/**
 * Least-squares convergence slopes on the log-log axes of the figures:
 * abscissa is the cubic root of the cell count, ordinate the relative
 * error.  The reported slope is negated so that it reads as a
 * convergence order (error ~ x^{-slope}).
 */

import { ErrorColumn, StudyRow } from "./csv.js";

export function abscissa(row: StudyRow): number {
  return Math.cbrt(row.n_cells);
}

/**
 * Least-squares slope of log(err) against log(x), negated.
 *
 * Fewer than two points have no slope (null); degenerate data (all
 * abscissas identical, e.g. duplicated rows) yields NaN.  With exactly
 * two points the result equals the closed-form two-point log-ratio.
 */
export function leastSquaresOrder(xs: number[], errs: number[]): number | null {
  if (xs.length !== errs.length) {
    throw new Error("slope inputs must have equal length");
  }
  if (xs.length < 2) {
    return null;
  }
  const lx = xs.map(Math.log);
  const le = errs.map(Math.log);
  const mx = lx.reduce((a, b) => a + b, 0) / lx.length;
  const me = le.reduce((a, b) => a + b, 0) / le.length;
  let sxx = 0;
  let sxe = 0;
  for (let i = 0; i < lx.length; i++) {
    sxx += (lx[i] - mx) ** 2;
    sxe += (lx[i] - mx) * (le[i] - me);
  }
  if (sxx === 0) {
    return NaN;
  }
  return -sxe / sxx;
}

/** Order of one error column of a study, on the figure's axes. */
export function seriesOrder(rows: StudyRow[], column: ErrorColumn): number | null {
  return leastSquaresOrder(rows.map(abscissa), rows.map((r) => r[column]));
}
