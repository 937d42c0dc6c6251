// Pre-plot envelope verification. The adaptive row in a sweep CSV
// claims to be the pointwise minimum of the per-scheme times; the chart
// refuses to draw a file where that claim does not hold exactly, so a
// tampered or truncated CSV fails loudly instead of plotting a lie.

import { ADAPTIVE_LABEL, type SweepFrame } from "./types.js";

/**
 * Check that at every cluster size the adaptive row equals the minimum
 * T_analytic over the scheme rows, that it is flagged as selected, and
 * that it is empty exactly when no scheme is feasible. Throws on the
 * first violation, naming the cluster size.
 */
export function verifyEnvelope(frame: SweepFrame): void {
  const sizes = [...new Set(frame.rows.map((row) => row.n))];
  for (const n of sizes) {
    const at = frame.rows.filter((row) => row.n === n);
    const adaptive = at.filter((row) => row.scheme === ADAPTIVE_LABEL);
    if (adaptive.length !== 1) {
      throw new Error(
        `envelope check failed at N=${n}: expected one ${ADAPTIVE_LABEL} row, ` +
          `found ${adaptive.length}`,
      );
    }
    const envelope = adaptive[0];
    const times = at
      .filter((row) => row.scheme !== ADAPTIVE_LABEL && row.tAnalytic !== null)
      .map((row) => row.tAnalytic as number);

    if (times.length === 0) {
      if (envelope.tAnalytic !== null) {
        throw new Error(
          `envelope check failed at N=${n}: no scheme is feasible but the ` +
            `${ADAPTIVE_LABEL} row carries a time`,
        );
      }
      continue;
    }
    if (envelope.tAnalytic === null) {
      throw new Error(
        `envelope check failed at N=${n}: feasible schemes exist but the ` +
          `${ADAPTIVE_LABEL} row is empty`,
      );
    }
    const minimum = Math.min(...times);
    if (envelope.tAnalytic !== minimum) {
      throw new Error(
        `envelope check failed at N=${n}: ${ADAPTIVE_LABEL} time ` +
          `${envelope.tAnalytic} differs from the pointwise minimum ${minimum}`,
      );
    }
    if (!envelope.selected) {
      throw new Error(
        `envelope check failed at N=${n}: ${ADAPTIVE_LABEL} row is not ` +
          `flagged in selected_by_acm2`,
      );
    }
    const winners = at.filter(
      (row) => row.scheme !== ADAPTIVE_LABEL && row.selected,
    );
    if (winners.length !== 1) {
      throw new Error(
        `envelope check failed at N=${n}: expected exactly one selected ` +
          `scheme row, found ${winners.length}`,
      );
    }
    if (winners[0].tAnalytic !== minimum) {
      throw new Error(
        `envelope check failed at N=${n}: selected scheme ${winners[0].scheme} ` +
          `does not attain the pointwise minimum`,
      );
    }
  }
}
