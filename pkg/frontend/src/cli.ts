#!/usr/bin/env node
// Script entry: render <sweep.csv> --out <fig.svg> [--title ...]
// With --table the input is a comparison-table CSV and the output is
// markdown. All validation happens before the output file is touched.

import { readFileSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { renderSweepChart } from "./chart.js";
import { parseSweepCsv } from "./csv.js";
import { renderTableMarkdown } from "./table.js";

const USAGE =
  "usage: render <sweep.csv> --out <fig.svg> [--title ...]\n" +
  "       render <table.csv> --table --out <table.md>";

export function run(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        out: { type: "string" },
        title: { type: "string" },
        table: { type: "boolean", default: false },
      },
    });
  } catch (error) {
    console.error(`error: ${(error as Error).message}\n${USAGE}`);
    return 2;
  }
  const { positionals, values } = parsed;
  if (positionals.length !== 1 || !values.out) {
    console.error(USAGE);
    return 2;
  }
  if (values.table && values.title) {
    console.error("error: --title only applies to sweep charts");
    return 2;
  }

  let csvText: string;
  try {
    csvText = readFileSync(positionals[0], "utf8");
  } catch (error) {
    console.error(`error: cannot read ${positionals[0]}: ${(error as Error).message}`);
    return 1;
  }

  let rendered: string;
  try {
    rendered = values.table
      ? renderTableMarkdown(csvText)
      : renderSweepChart(parseSweepCsv(csvText), values.title);
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    return 1;
  }

  try {
    writeFileSync(values.out, rendered);
  } catch (error) {
    console.error(`error: cannot write ${values.out}: ${(error as Error).message}`);
    return 1;
  }
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  process.exit(run(process.argv.slice(2)));
}
