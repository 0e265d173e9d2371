/** Wire types for the exploration service; the view document is the whole contract. */

export interface IntervalDoc {
  lower: number;
  upper: number;
  upper_closed: boolean;
}

export interface StatsDoc {
  count: number;
  mean?: number;
  variance?: number;
  min?: number;
  max?: number;
}

export interface NodeElement {
  id: number;
  interval: IntervalDoc;
  stats: StatsDoc;
}

export interface ObjectElement {
  subject: string;
  value: number;
}

export interface CountersDoc {
  nodes_built: number;
  leaves_built: number;
  stats_from_scratch: number;
  stats_aggregated: number;
  objects_scanned: number;
}

export interface ViewDoc {
  kind: "nodes" | "objects";
  elements: Array<NodeElement | ObjectElement>;
  breadcrumb: IntervalDoc[];
  counters: CountersDoc;
}

export interface DatasetInfo {
  dataset_id: string;
  size: number;
  minv: number;
  maxv: number;
  kind: "numeric" | "temporal";
}

export interface SessionRequest {
  dataset_id: string;
  scenario: "BSC" | "RES" | "RAN";
  variant?: "C" | "R";
  leaves?: number;
  degree?: number;
  lambda_min?: number;
  lambda_max?: number;
  resource?: string;
  range?: [number, number];
  incremental?: boolean;
}

export interface SessionResponse {
  session_id: string;
  view: ViewDoc;
}

export interface AdaptationCounters {
  leaves_scratch: number;
  leaves_derived: number;
  internals_scratch: number;
  internals_derived: number;
}

export interface AdaptationReportDoc {
  case: { kind: string; k: number | null };
  construction: AdaptationCounters;
  statistics: AdaptationCounters;
  exact_reuse: boolean;
  metrics: Record<string, number>;
}

export interface AdaptResponse {
  view: ViewDoc;
  adaptation_report: AdaptationReportDoc;
}

export function isNodeElement(e: NodeElement | ObjectElement): e is NodeElement {
  return (e as NodeElement).interval !== undefined;
}
