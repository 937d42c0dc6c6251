// Shared fixture access and CSV surgery for the renderer tests. The
// sweep schema is unquoted, so cell edits are plain comma splits.

import { readFileSync } from "node:fs";

import { SWEEP_COLUMNS } from "../src/types.js";

export function fixture(name: string): string {
  return readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8");
}

/**
 * Rewrite one cell in every CSV line matching (n, scheme). Returns the
 * edited text; throws if nothing matched so a stale test cannot pass.
 */
export function editCell(
  csv: string,
  n: number,
  scheme: string,
  column: string,
  edit: (value: string) => string,
): string {
  const index = SWEEP_COLUMNS.indexOf(column as (typeof SWEEP_COLUMNS)[number]);
  if (index < 0) throw new Error(`unknown column ${column}`);
  let hits = 0;
  const lines = csv.split("\n").map((line) => {
    const cells = line.split(",");
    if (cells[0] === String(n) && cells[1] === scheme) {
      hits += 1;
      cells[index] = edit(cells[index]);
      return cells.join(",");
    }
    return line;
  });
  if (hits === 0) throw new Error(`no row for N=${n} scheme=${scheme}`);
  return lines.join("\n");
}

export function dropRow(csv: string, n: number, scheme: string): string {
  const lines = csv
    .split("\n")
    .filter((line) => !line.startsWith(`${n},${scheme},`));
  return lines.join("\n");
}

/**
 * Build a minimal well-formed sweep CSV. Each entry gives the scheme
 * times at one cluster size; the winner gets the flag and the acm2 row
 * duplicates it.
 */
export function syntheticSweep(
  sizes: number[],
  times: (n: number, scheme: string) => number | null,
  schemes: string[] = ["repetition", "mds", "polynomial", "matdot", "product"],
): string {
  const lines = [SWEEP_COLUMNS.join(",")];
  for (const n of sizes) {
    const feasible = schemes
      .map((scheme) => ({ scheme, t: times(n, scheme) }))
      .filter((entry) => entry.t !== null) as { scheme: string; t: number }[];
    const best =
      feasible.length === 0
        ? null
        : feasible.reduce((a, b) => (b.t < a.t ? b : a));
    for (const scheme of schemes) {
      const t = times(n, scheme);
      const selected = best !== null && scheme === best.scheme ? "1" : "0";
      lines.push(
        t === null
          ? `${n},${scheme},,,,,,,,0`
          : `${n},${scheme},2,4,${t},,1000,100,0.9,${selected}`,
      );
    }
    lines.push(
      best === null
        ? `${n},acm2,,,,,,,,0`
        : `${n},acm2,2,4,${best.t},,1000,100,0.9,1`,
    );
  }
  return lines.join("\n") + "\n";
}
