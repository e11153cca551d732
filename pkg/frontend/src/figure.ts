/**
 * SVG log-log convergence figure: one panel per mesh family, one series
 * per error column, reference slope triangles for orders 1 and 2, and a
 * sidecar text file with the least-squares order of every series.
 */

import { byFamily, ERROR_COLUMNS, ErrorColumn, StudyRow } from "./csv.js";
import { abscissa, seriesOrder } from "./slope.js";

export interface SeriesSlope {
  family: string;
  column: ErrorColumn;
  order: number | null;
}

export interface Figure {
  svg: string;
  slopes: SeriesSlope[];
}

const SERIES_STYLE: Record<ErrorColumn, { color: string; label: string }> = {
  e_u: { color: "#1f77b4", label: "displacement" },
  e_jump: { color: "#d62728", label: "jump" },
  e_grad: { color: "#2ca02c", label: "gradient" },
  e_lambda_n: { color: "#9467bd", label: "normal multiplier" },
};

const PANEL_W = 320;
const PANEL_H = 300;
const MARGIN = { top: 34, right: 16, bottom: 42, left: 54 };

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let d = Math.ceil(Math.log10(lo)); d <= Math.floor(Math.log10(hi)); d++) {
    ticks.push(10 ** d);
  }
  return ticks;
}

function fmtOrder(order: number | null): string {
  if (order === null) {
    return "";
  }
  return Number.isNaN(order) ? "NaN" : order.toFixed(2);
}

function renderPanel(family: string, rows: StudyRow[], x0: number): {
  svg: string;
  slopes: SeriesSlope[];
} {
  const xs = rows.map(abscissa);
  const errs = rows.flatMap((r) => ERROR_COLUMNS.map((c) => r[c]));
  const xLo = Math.min(...xs) / 1.2;
  const xHi = Math.max(...xs) * 1.2;
  const yLo = Math.min(...errs) / 1.5;
  const yHi = Math.max(...errs) * 1.5;
  const plotW = PANEL_W - MARGIN.left - MARGIN.right;
  const plotH = PANEL_H - MARGIN.top - MARGIN.bottom;
  const sx = (v: number) =>
    x0 + MARGIN.left + (plotW * Math.log(v / xLo)) / Math.log(xHi / xLo);
  const sy = (v: number) =>
    MARGIN.top + plotH - (plotH * Math.log(v / yLo)) / Math.log(yHi / yLo);

  const parts: string[] = [];
  parts.push(
    `<rect x="${x0 + MARGIN.left}" y="${MARGIN.top}" width="${plotW}" ` +
      `height="${plotH}" fill="none" stroke="#444"/>`,
    `<text x="${x0 + MARGIN.left + plotW / 2}" y="${MARGIN.top - 12}" ` +
      `text-anchor="middle" font-size="13" font-weight="bold">${family}</text>`,
    `<text x="${x0 + MARGIN.left + plotW / 2}" y="${PANEL_H - 8}" ` +
      `text-anchor="middle" font-size="11">cells^(1/3)</text>`,
  );
  for (const t of logTicks(xLo, xHi)) {
    parts.push(
      `<line x1="${sx(t)}" y1="${MARGIN.top + plotH}" x2="${sx(t)}" ` +
        `y2="${MARGIN.top + plotH + 4}" stroke="#444"/>`,
      `<text x="${sx(t)}" y="${MARGIN.top + plotH + 16}" text-anchor="middle" ` +
        `font-size="10">${t}</text>`,
    );
  }
  for (const t of logTicks(yLo, yHi)) {
    parts.push(
      `<line x1="${x0 + MARGIN.left - 4}" y1="${sy(t)}" ` +
        `x2="${x0 + MARGIN.left}" y2="${sy(t)}" stroke="#444"/>`,
      `<text x="${x0 + MARGIN.left - 6}" y="${sy(t) + 3}" text-anchor="end" ` +
        `font-size="10">1e${Math.round(Math.log10(t))}</text>`,
    );
  }

  const slopes: SeriesSlope[] = [];
  let legendY = MARGIN.top + 14;
  for (const column of ERROR_COLUMNS) {
    const style = SERIES_STYLE[column];
    const pts = rows.map((r) => `${sx(abscissa(r))},${sy(r[column])}`);
    if (pts.length > 1) {
      parts.push(
        `<polyline points="${pts.join(" ")}" fill="none" ` +
          `stroke="${style.color}" stroke-width="1.5"/>`,
      );
    }
    for (const p of pts) {
      const [px, py] = p.split(",");
      parts.push(`<circle cx="${px}" cy="${py}" r="3" fill="${style.color}"/>`);
    }
    const order = seriesOrder(rows, column);
    slopes.push({ family, column, order });
    const annotation = order === null ? "" : ` (${fmtOrder(order)})`;
    parts.push(
      `<text x="${x0 + MARGIN.left + 8}" y="${legendY}" font-size="10" ` +
        `fill="${style.color}">${style.label}${annotation}</text>`,
    );
    legendY += 13;
  }

  // reference slope triangles for orders 1 and 2
  if (rows.length > 1) {
    const xa = xHi / 1.6;
    const xb = xHi / 1.1;
    for (const order of [1, 2]) {
      const ya = yLo * 3;
      const yb = ya * (xa / xb) ** order;
      parts.push(
        `<path d="M ${sx(xa)} ${sy(ya)} L ${sx(xb)} ${sy(ya)} ` +
          `L ${sx(xb)} ${sy(yb)} Z" fill="none" stroke="#888"/>`,
        `<text x="${sx(xb) + 3}" y="${(sy(ya) + sy(yb)) / 2}" ` +
          `font-size="9" fill="#888">${order}</text>`,
      );
    }
  }
  return { svg: parts.join("\n"), slopes };
}

export function renderConvergence(rows: StudyRow[]): Figure {
  if (rows.length === 0) {
    throw new Error("no study rows to plot");
  }
  const families = byFamily(rows);
  const panels: string[] = [];
  const slopes: SeriesSlope[] = [];
  let x0 = 0;
  for (const [family, famRows] of families) {
    const panel = renderPanel(family, famRows, x0);
    panels.push(panel.svg);
    slopes.push(...panel.slopes);
    x0 += PANEL_W;
  }
  const svg =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${x0}" ` +
    `height="${PANEL_H}" font-family="sans-serif">\n` +
    `<rect width="${x0}" height="${PANEL_H}" fill="white"/>\n` +
    panels.join("\n") +
    `\n</svg>\n`;
  return { svg, slopes };
}

/** Sidecar text: one `family column order` line per series. */
export function slopeSidecar(slopes: SeriesSlope[]): string {
  const lines = slopes.map((s) => {
    const order = s.order === null ? "-" : fmtOrder(s.order);
    return `${s.family} ${s.column} ${order}`;
  });
  return lines.join("\n") + "\n";
}
