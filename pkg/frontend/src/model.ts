/** Pure derivation of what to draw from the last view document.
 *
 * Groups render one column per node with height = object count; at the
 * leaf level each data object becomes its own column with height = value.
 * Nothing here keeps state: repainting from the same view is identical.
 */

import { isNodeElement } from "./types.js";
import type { AdaptationReportDoc, IntervalDoc, ViewDoc } from "./types.js";

export interface Column {
  key: string;
  label: string;
  height: number;
  tooltip: string;
  nodeId?: number;
}

export interface RenderModel {
  mode: "groups" | "objects";
  columns: Column[];
  maxHeight: number;
  breadcrumb: string[];
  countersLine: string;
}

const fmt = (x: number): string =>
  Number.isInteger(x) ? String(x) : x.toFixed(2);

export function formatInterval(interval: IntervalDoc): string {
  const close = interval.upper_closed ? "]" : ")";
  return `[${fmt(interval.lower)}, ${fmt(interval.upper)}${close}`;
}

function nodeTooltip(interval: IntervalDoc, stats: ViewDoc["elements"][0] extends never ? never : any): string {
  if (!stats.count) return `${formatInterval(interval)} — empty`;
  return [
    formatInterval(interval),
    `N=${stats.count}`,
    `mean=${fmt(stats.mean)}`,
    `variance=${fmt(stats.variance)}`,
    `min=${fmt(stats.min)}`,
    `max=${fmt(stats.max)}`,
  ].join("  ");
}

function shortSubject(subject: string): string {
  const cut = Math.max(subject.lastIndexOf("/"), subject.lastIndexOf("#"), subject.lastIndexOf(":"));
  return cut >= 0 ? subject.slice(cut + 1) : subject;
}

export function renderModel(view: ViewDoc): RenderModel {
  const breadcrumb = view.breadcrumb.map(formatInterval);
  const countersLine =
    `built ${view.counters.nodes_built} nodes ` +
    `(${view.counters.leaves_built} leaves, ` +
    `${view.counters.stats_aggregated} aggregated / ` +
    `${view.counters.stats_from_scratch} scanned stats)`;
  if (view.kind === "objects") {
    const columns = view.elements.map((element) => {
      const obj = element as { subject: string; value: number };
      return {
        key: obj.subject,
        label: shortSubject(obj.subject),
        height: obj.value,
        tooltip: `${obj.subject} = ${fmt(obj.value)}`,
      };
    });
    return {
      mode: "objects",
      columns,
      maxHeight: Math.max(...columns.map((c) => c.height), 0),
      breadcrumb,
      countersLine,
    };
  }
  const columns = view.elements.map((element) => {
    if (!isNodeElement(element)) throw new Error("mixed view elements");
    return {
      key: `n${element.id}`,
      label: formatInterval(element.interval),
      height: element.stats.count,
      tooltip: nodeTooltip(element.interval, element.stats),
      nodeId: element.id,
    };
  });
  return {
    mode: "groups",
    columns,
    maxHeight: Math.max(...columns.map((c) => c.height), 0),
    breadcrumb,
    countersLine,
  };
}

export interface ColumnRect {
  x: number;
  y: number;
  width: number;
  height: number;
  column: Column;
}

/** Place columns inside a width x height box with proportional heights. */
export function layoutColumns(
  model: RenderModel,
  width: number,
  height: number,
  gap = 4,
): ColumnRect[] {
  const n = model.columns.length;
  if (n === 0) return [];
  const columnWidth = Math.max((width - gap * (n + 1)) / n, 1);
  const scale = model.maxHeight > 0 ? (height - 4) / model.maxHeight : 0;
  return model.columns.map((column, i) => {
    const h = Math.max(column.height * scale, column.height > 0 ? 2 : 0);
    return {
      x: gap + i * (columnWidth + gap),
      y: height - h,
      width: columnWidth,
      height: h,
      column,
    };
  });
}

export function describeReport(report: AdaptationReportDoc): string[] {
  const c = report.construction;
  const s = report.statistics;
  const label = report.case.k !== null ? `${report.case.kind} (k=${report.case.k})` : report.case.kind;
  return [
    `case: ${label}${report.exact_reuse ? "" : " — merge not exact, reallocated"}`,
    `nodes built: ${c.leaves_scratch + c.internals_scratch} from scratch, ` +
      `${c.leaves_derived + c.internals_derived} derived from the old tree`,
    `statistics: ${s.leaves_scratch + s.internals_scratch} recomputed, ` +
      `${s.leaves_derived + s.internals_derived} reused via aggregation`,
  ];
}
