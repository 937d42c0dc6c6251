// Sweep line chart: expected completion time against cluster size, one
// series per scheme plus the adaptive envelope. The renderer only moves
// numbers from the CSV onto the page; the envelope is verified before
// anything is drawn, and infeasible cells become gaps in their series.

import { verifyEnvelope } from "./envelope.js";
import { el, svgDocument, textEl } from "./svg.js";
import {
  ADAPTIVE_LABEL,
  schemeRows,
  type SweepFrame,
  type SweepRow,
} from "./types.js";

const WIDTH = 820;
const HEIGHT = 480;
const MARGIN = { top: 48, right: 200, bottom: 56, left: 72 };

const SCHEME_COLORS: Record<string, string> = {
  repetition: "#8c564b",
  mds: "#1f77b4",
  polynomial: "#2ca02c",
  matdot: "#d62728",
  product: "#9467bd",
};
const FALLBACK_COLORS = ["#ff7f0e", "#17becf", "#e377c2", "#bcbd22"];

function seriesColor(scheme: string, index: number): string {
  return (
    SCHEME_COLORS[scheme] ?? FALLBACK_COLORS[index % FALLBACK_COLORS.length]
  );
}

function fmt(value: number): string {
  return Number(value.toFixed(2)).toString();
}

function tickLabel(value: number): string {
  return Number(value.toPrecision(3)).toString();
}

/** Contiguous runs of plottable points; a gap splits the polyline. */
function runs(rows: SweepRow[]): SweepRow[][] {
  const out: SweepRow[][] = [];
  let current: SweepRow[] = [];
  for (const row of rows) {
    if (row.tAnalytic === null) {
      if (current.length > 0) out.push(current);
      current = [];
    } else {
      current.push(row);
    }
  }
  if (current.length > 0) out.push(current);
  return out;
}

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const magnitude = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const multiple of [1, 2, 5, 10]) {
    if (magnitude * multiple >= raw) return magnitude * multiple;
  }
  return magnitude * 10;
}

interface SeriesStyle {
  color: string;
  width: number;
  dash?: string;
  marker: number;
}

function seriesElements(
  rows: SweepRow[],
  x: (n: number) => number,
  y: (t: number) => number,
  style: SeriesStyle,
): string[] {
  const parts: string[] = [];
  for (const run of runs(rows)) {
    const points = run
      .map((row) => `${fmt(x(row.n))},${fmt(y(row.tAnalytic as number))}`)
      .join(" ");
    if (run.length > 1) {
      const attrs: Record<string, string | number> = {
        points,
        fill: "none",
        stroke: style.color,
        "stroke-width": style.width,
      };
      if (style.dash) attrs["stroke-dasharray"] = style.dash;
      parts.push(el("polyline", attrs));
    }
    for (const row of run) {
      parts.push(
        el("circle", {
          cx: fmt(x(row.n)),
          cy: fmt(y(row.tAnalytic as number)),
          r: style.marker,
          fill: style.color,
        }),
      );
    }
  }
  return parts;
}

/** Schemes the adaptive row picked at least once, with pick counts. */
export function selectionCounts(frame: SweepFrame): Map<string, number> {
  const counts = new Map<string, number>();
  for (const row of frame.rows) {
    if (row.scheme !== ADAPTIVE_LABEL && row.selected) {
      counts.set(row.scheme, (counts.get(row.scheme) ?? 0) + 1);
    }
  }
  return counts;
}

/**
 * Draw the verified sweep as a standalone SVG string. Throws if the
 * envelope claim fails or nothing in the frame is plottable.
 */
export function renderSweepChart(frame: SweepFrame, title?: string): string {
  verifyEnvelope(frame);

  const plottable = frame.rows.filter((row) => row.tAnalytic !== null);
  if (plottable.length === 0) {
    throw new Error("sweep CSV has no feasible rows to plot");
  }

  const sizes = frame.rows.map((row) => row.n);
  let nLo = Math.min(...sizes);
  let nHi = Math.max(...sizes);
  if (nLo === nHi) {
    nLo -= 1;
    nHi += 1;
  }
  const tHi = Math.max(...plottable.map((row) => row.tAnalytic as number)) * 1.08;

  const plotLeft = MARGIN.left;
  const plotRight = WIDTH - MARGIN.right;
  const plotTop = MARGIN.top;
  const plotBottom = HEIGHT - MARGIN.bottom;
  const x = (n: number) =>
    plotLeft + ((n - nLo) / (nHi - nLo)) * (plotRight - plotLeft);
  const y = (t: number) => plotBottom - (t / tHi) * (plotBottom - plotTop);

  const parts: string[] = [
    el("rect", { x: 0, y: 0, width: WIDTH, height: HEIGHT, fill: "#ffffff" }),
  ];

  // horizontal grid and y ticks
  const yStep = niceStep(tHi, 5);
  for (let t = 0; t <= tHi + 1e-12; t += yStep) {
    const py = fmt(y(t));
    parts.push(
      el("line", {
        x1: plotLeft,
        y1: py,
        x2: plotRight,
        y2: py,
        stroke: t === 0 ? "#333333" : "#dddddd",
        "stroke-width": 1,
      }),
      textEl(
        {
          x: plotLeft - 8,
          y: Number(py) + 4,
          "text-anchor": "end",
          "font-size": 12,
          fill: "#333333",
        },
        tickLabel(t),
      ),
    );
  }

  // x axis with integer ticks
  const span = nHi - nLo;
  const xStep = span <= 16 ? 1 : Math.ceil(span / 12);
  parts.push(
    el("line", {
      x1: plotLeft,
      y1: plotBottom,
      x2: plotRight,
      y2: plotBottom,
      stroke: "#333333",
      "stroke-width": 1,
    }),
    el("line", {
      x1: plotLeft,
      y1: plotTop,
      x2: plotLeft,
      y2: plotBottom,
      stroke: "#333333",
      "stroke-width": 1,
    }),
  );
  for (let n = nLo; n <= nHi; n += xStep) {
    const px = fmt(x(n));
    parts.push(
      el("line", {
        x1: px,
        y1: plotBottom,
        x2: px,
        y2: plotBottom + 5,
        stroke: "#333333",
        "stroke-width": 1,
      }),
      textEl(
        {
          x: px,
          y: plotBottom + 20,
          "text-anchor": "middle",
          "font-size": 12,
          fill: "#333333",
        },
        String(n),
      ),
    );
  }

  // axis labels and title
  parts.push(
    textEl(
      {
        x: (plotLeft + plotRight) / 2,
        y: HEIGHT - 14,
        "text-anchor": "middle",
        "font-size": 14,
        fill: "#111111",
      },
      "cluster size N",
    ),
    textEl(
      {
        x: 18,
        y: (plotTop + plotBottom) / 2,
        "text-anchor": "middle",
        "font-size": 14,
        fill: "#111111",
        transform: `rotate(-90 18 ${fmt((plotTop + plotBottom) / 2)})`,
      },
      "expected completion time T",
    ),
  );
  if (title) {
    parts.push(
      textEl(
        {
          x: (plotLeft + plotRight) / 2,
          y: 26,
          "text-anchor": "middle",
          "font-size": 16,
          "font-weight": "bold",
          fill: "#111111",
        },
        title,
      ),
    );
  }

  // scheme series, then the adaptive envelope on top
  const adaptiveStyle: SeriesStyle = {
    color: "#111111",
    width: 3,
    dash: "7 4",
    marker: 3.5,
  };
  frame.schemes.forEach((scheme, index) => {
    parts.push(
      ...seriesElements(schemeRows(frame, scheme), x, y, {
        color: seriesColor(scheme, index),
        width: 1.8,
        marker: 2.5,
      }),
    );
  });
  parts.push(
    ...seriesElements(schemeRows(frame, ADAPTIVE_LABEL), x, y, adaptiveStyle),
  );

  // legend
  const legendX = plotRight + 18;
  let legendY = plotTop + 6;
  const legendEntry = (label: string, style: SeriesStyle) => {
    const attrs: Record<string, string | number> = {
      x1: legendX,
      y1: legendY,
      x2: legendX + 26,
      y2: legendY,
      stroke: style.color,
      "stroke-width": style.width,
    };
    if (style.dash) attrs["stroke-dasharray"] = style.dash;
    parts.push(
      el("line", attrs),
      textEl(
        {
          x: legendX + 32,
          y: legendY + 4,
          "font-size": 12,
          fill: "#111111",
        },
        label,
      ),
    );
    legendY += 20;
  };
  frame.schemes.forEach((scheme, index) => {
    legendEntry(scheme, {
      color: seriesColor(scheme, index),
      width: 1.8,
      marker: 2.5,
    });
  });
  legendEntry(`${ADAPTIVE_LABEL} (adaptive)`, adaptiveStyle);

  // selection annotation: every scheme the adaptive row picked
  legendY += 8;
  parts.push(
    textEl(
      {
        x: legendX,
        y: legendY,
        "font-size": 12,
        "font-weight": "bold",
        fill: "#111111",
      },
      "selected:",
    ),
  );
  legendY += 17;
  const counts = selectionCounts(frame);
  if (counts.size === 0) {
    parts.push(
      textEl(
        { x: legendX + 8, y: legendY, "font-size": 12, fill: "#333333" },
        "none",
      ),
    );
  }
  const sizeCount = new Set(sizes).size;
  for (const [scheme, count] of counts) {
    parts.push(
      textEl(
        { x: legendX + 8, y: legendY, "font-size": 12, fill: "#333333" },
        `${scheme} (${count} of ${sizeCount} N)`,
      ),
    );
    legendY += 17;
  }

  return svgDocument(WIDTH, HEIGHT, [
    el("g", { "font-family": "sans-serif" }, parts),
  ]);
}
