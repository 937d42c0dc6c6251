// Strict CSV ingestion. The renderer never repairs input: missing or
// extra columns, malformed numbers, and out-of-order rows are all
// reported with enough context to find the offending cell.

import Papa from "papaparse";

import {
  ADAPTIVE_LABEL,
  SWEEP_COLUMNS,
  TABLE_COLUMNS,
  type SweepFrame,
  type SweepRow,
} from "./types.js";

function parseRecords(
  text: string,
  expected: readonly string[],
  what: string,
): Record<string, string>[] {
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  const hard = parsed.errors.filter((e) => e.type !== "FieldMismatch");
  if (hard.length > 0) {
    throw new Error(`${what} CSV is malformed: ${hard[0].message}`);
  }
  const fields = parsed.meta.fields ?? [];
  const missing = expected.filter((column) => !fields.includes(column));
  if (missing.length > 0) {
    throw new Error(`${what} CSV is missing column(s): ${missing.join(", ")}`);
  }
  const extra = fields.filter((column) => !expected.includes(column));
  if (extra.length > 0) {
    throw new Error(`${what} CSV has unexpected column(s): ${extra.join(", ")}`);
  }
  if (parsed.data.length === 0) {
    throw new Error(`${what} CSV has no data rows`);
  }
  return parsed.data;
}

function numericCell(
  record: Record<string, string>,
  column: string,
  line: number,
): number | null {
  const raw = (record[column] ?? "").trim();
  if (raw === "") return null;
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new Error(`sweep CSV line ${line}: ${column} is not a number: "${raw}"`);
  }
  return value;
}

function requiredInt(
  record: Record<string, string>,
  column: string,
  line: number,
): number {
  const value = numericCell(record, column, line);
  if (value === null || !Number.isInteger(value) || value < 1) {
    throw new Error(
      `sweep CSV line ${line}: ${column} must be a positive integer, got "${record[column]}"`,
    );
  }
  return value;
}

/**
 * Parse and validate one sweep CSV. Enforces the exact column set, the
 * 0/1 selection flag, and ascending N within every scheme series.
 */
export function parseSweepCsv(text: string): SweepFrame {
  const records = parseRecords(text, SWEEP_COLUMNS, "sweep");
  const rows: SweepRow[] = [];
  const schemes: string[] = [];
  records.forEach((record, index) => {
    const line = index + 2; // header is line 1
    const flag = record.selected_by_acm2;
    if (flag !== "0" && flag !== "1") {
      throw new Error(
        `sweep CSV line ${line}: selected_by_acm2 must be 0 or 1, got "${flag}"`,
      );
    }
    const scheme = record.scheme;
    if (!scheme) {
      throw new Error(`sweep CSV line ${line}: scheme cell is empty`);
    }
    if (scheme !== ADAPTIVE_LABEL && !schemes.includes(scheme)) {
      schemes.push(scheme);
    }
    rows.push({
      n: requiredInt(record, "N", line),
      scheme,
      pOpt: numericCell(record, "p_opt", line),
      k: numericCell(record, "k", line),
      tAnalytic: numericCell(record, "T_analytic", line),
      tSimulated: numericCell(record, "T_simulated", line),
      storageMaster: numericCell(record, "storage_master", line),
      storageWorker: numericCell(record, "storage_worker", line),
      rho: numericCell(record, "rho", line),
      selected: flag === "1",
    });
  });

  const lastSeen = new Map<string, number>();
  for (const row of rows) {
    const previous = lastSeen.get(row.scheme);
    if (previous !== undefined && row.n <= previous) {
      throw new Error(
        `sweep CSV: N values for ${row.scheme} are not strictly ascending ` +
          `(${previous} then ${row.n})`,
      );
    }
    lastSeen.set(row.scheme, row.n);
  }
  return { schemes, rows };
}

/**
 * Parse and validate one comparison-table CSV. Cells stay verbatim
 * strings: the table renderer copies them without reformatting.
 */
export function parseTableCsv(text: string): Record<string, string>[] {
  return parseRecords(text, TABLE_COLUMNS, "table");
}
