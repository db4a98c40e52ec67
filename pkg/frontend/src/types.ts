// Wire types for the customization service (format_version 1 documents).

export interface ModelEdge {
  id: string;
  invertex: string[];
  outvertex: string[];
  mode: "and" | "or";
}

export interface ModelConcern {
  id: string;
  name: string;
  components: string[];
  edges: ModelEdge[];
}

export interface ModelDimension {
  id: string;
  name: string;
  concerns: ModelConcern[];
}

export interface ModelPoint {
  id: string;
  name: string;
  components: string[];
}

export interface ModelComponent {
  id: string;
  point: string;
  label: string;
  description?: string;
}

export interface ModelDocument {
  format_version: number;
  id: string;
  revision: string;
  customization_points: ModelPoint[];
  components: ModelComponent[];
  dimensions: ModelDimension[];
}

export interface ModelSummary {
  id: string;
  revision: string;
  components: number;
  concerns: number;
}

export interface SessionInfo {
  id: string;
  model: string;
  revision: string;
  state_version: number;
  tenant: string;
}

export type OpKind = "add" | "delete";

export interface Operation {
  op: OpKind;
  component: string;
  concern?: string;
}

export interface Decision {
  verdict: "valid" | "invalid";
  reason: string;
  satisfied_edge: string | null;
  recorded_supports: string[];
  removed_edges: string[];
  state_version: number;
}

export interface ConcernSelection {
  id: string;
  components: string[];
  edges: string[];
}

export interface CustomizationDocument {
  format_version: number;
  model: string;
  revision: string;
  tenant: string;
  concerns: ConcernSelection[];
}

export interface GuidanceEntry {
  source: string;
  target: string;
  coinput: string[];
  cooutput: string[];
  path: string[];
  length: number;
}
