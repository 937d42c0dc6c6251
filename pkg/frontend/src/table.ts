// Markdown rendering of the comparison-table CSV. Cells are copied
// verbatim: numbers keep the exact digits the CSV carried, and empty
// numeric cells (infeasible combinations) render as the literal N/A.

import { parseTableCsv } from "./csv.js";
import { TABLE_COLUMNS } from "./types.js";

const NUMERIC_COLUMNS = new Set([
  "k",
  "gamma",
  "mu_master",
  "mu_worker",
  "rho",
]);

function cellText(column: string, value: string): string {
  if (NUMERIC_COLUMNS.has(column) && value === "") return "N/A";
  return value;
}

/** Render one table CSV as a pipe-delimited markdown table. */
export function renderTableMarkdown(csvText: string): string {
  const records = parseTableCsv(csvText);
  const columns = [...TABLE_COLUMNS];
  const body = records.map(
    (record) =>
      `| ${columns
        .map((column) => cellText(column, record[column] ?? ""))
        .join(" | ")} |`,
  );
  return [
    `| ${columns.join(" | ")} |`,
    `| ${columns.map(() => "---").join(" | ")} |`,
    ...body,
    "",
  ].join("\n");
}
