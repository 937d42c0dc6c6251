// Column contracts for the two CSV layouts the renderer accepts. Both
// come from the codedmm command line and are fixed: a header mismatch
// is a hard error, never a guess.

export const SWEEP_COLUMNS = [
  "N",
  "scheme",
  "p_opt",
  "k",
  "T_analytic",
  "T_simulated",
  "storage_master",
  "storage_worker",
  "rho",
  "selected_by_acm2",
] as const;

export const TABLE_COLUMNS = [
  "scheme",
  "N",
  "k",
  "gamma",
  "mu_master",
  "mu_worker",
  "rho",
  "feasible",
] as const;

/** The label the sweep uses for the adaptive selector's own row. */
export const ADAPTIVE_LABEL = "acm2";

/** One sweep row; numeric cells are null where the CSV left them empty. */
export interface SweepRow {
  n: number;
  scheme: string;
  pOpt: number | null;
  k: number | null;
  tAnalytic: number | null;
  tSimulated: number | null;
  storageMaster: number | null;
  storageWorker: number | null;
  rho: number | null;
  selected: boolean;
}

/**
 * Parsed sweep. Scheme names keep their CSV order; the adaptive row is
 * split out so chart code can treat it as the envelope series.
 */
export interface SweepFrame {
  schemes: string[];
  rows: SweepRow[];
}

/** Rows of a scheme in frame order (ascending N by invariant). */
export function schemeRows(frame: SweepFrame, scheme: string): SweepRow[] {
  return frame.rows.filter((row) => row.scheme === scheme);
}
