export { renderSweepChart, selectionCounts } from "./chart.js";
export { parseSweepCsv, parseTableCsv } from "./csv.js";
export { verifyEnvelope } from "./envelope.js";
export { renderTableMarkdown } from "./table.js";
export {
  ADAPTIVE_LABEL,
  SWEEP_COLUMNS,
  TABLE_COLUMNS,
  schemeRows,
  type SweepFrame,
  type SweepRow,
} from "./types.js";
