#!/usr/bin/env node
/**
 * `plots` command line:
 *
 *   plots convergence <csv...> --out fig.svg
 *   plots locking <csv...> --out table.md
 *
 * Consumes CSV files written by `ddrcontact convergence` and renders a
 * log-log convergence figure (with a `<out>.slopes.txt` sidecar) or a
 * Markdown locking table.
 */

import { writeFileSync } from "node:fs";
import { basename } from "node:path";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { readStudy } from "./csv.js";
import { renderConvergence, slopeSidecar } from "./figure.js";
import { renderLockingTable } from "./locking.js";

export function convergenceCommand(csvs: string[], out: string): void {
  const rows = csvs.flatMap((path) => readStudy(path));
  const figure = renderConvergence(rows);
  writeFileSync(out, figure.svg);
  const sidecar = `${out}.slopes.txt`;
  writeFileSync(sidecar, slopeSidecar(figure.slopes));
  console.log(`wrote ${out} and ${sidecar}`);
}

export function lockingCommand(csvs: string[], out: string): void {
  const studies = csvs.map((path) => ({
    label: basename(path).replace(/\.csv$/, ""),
    rows: readStudy(path),
  }));
  writeFileSync(out, renderLockingTable(studies));
  console.log(`wrote ${out}`);
}

export function main(argv: string[]): void {
  yargs(argv)
    .command(
      "convergence <csv...>",
      "render a log-log convergence figure with slope annotations",
      (y) =>
        y
          .positional("csv", { type: "string", array: true, demandOption: true })
          .option("out", { type: "string", demandOption: true }),
      (args) => convergenceCommand(args.csv as string[], args.out),
    )
    .command(
      "locking <csv...>",
      "render a Markdown locking table from a stiffness sweep",
      (y) =>
        y
          .positional("csv", { type: "string", array: true, demandOption: true })
          .option("out", { type: "string", demandOption: true }),
      (args) => lockingCommand(args.csv as string[], args.out),
    )
    .demandCommand(1)
    .strict()
    .fail((msg, err) => {
      console.error(`error: ${err ? err.message : msg}`);
      process.exit(1);
    })
    .parseSync();
}

main(hideBin(process.argv));
