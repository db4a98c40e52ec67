// Workbench controller: all state transitions, zero validation of its own.
// Every verdict comes from a service Decision; the rendered selection always
// mirrors the most recent GET /v1/sessions/{id} response.

import { ServiceApi, ServiceError } from "./api";
import type {
  ConcernSelection,
  CustomizationDocument,
  Decision,
  GuidanceEntry,
  ModelConcern,
  ModelDocument,
  ModelSummary,
  Operation,
} from "./types";

export type Phase = "empty" | "model-loaded" | "session-open";

export interface ComponentRow {
  id: string;
  label: string;
  point: string;
  selected: boolean;
  /** Human-readable requirement summary, empty for free components. */
  requirementHint: string;
}

export interface ConcernView {
  id: string;
  name: string;
  components: string[];
  derived: boolean;
}

export interface WorkbenchState {
  phase: Phase;
  busy: boolean;
  error: string | null;
  needsRestart: boolean;
  model: ModelDocument | null;
  summary: ModelSummary | null;
  sessionId: string | null;
  tenant: string;
  stateVersion: number;
  dimensionId: string | null;
  concernId: string | null;
  /** Per-concern selections exactly as last reported by the service. */
  selection: Map<string, ConcernSelection>;
  lastOp: Operation | null;
  lastDecision: Decision | null;
  /** Requirement hint shown after a blocked add, derived from guidance. */
  blockedHint: string | null;
  guidanceFor: string | null;
  guidance: GuidanceEntry[];
  exported: string | null;
}

function initialState(): WorkbenchState {
  return {
    phase: "empty",
    busy: false,
    error: null,
    needsRestart: false,
    model: null,
    summary: null,
    sessionId: null,
    tenant: "default",
    stateVersion: 0,
    dimensionId: null,
    concernId: null,
    selection: new Map(),
    lastOp: null,
    lastDecision: null,
    blockedHint: null,
    guidanceFor: null,
    guidance: [],
    exported: null,
  };
}

export class Workbench {
  readonly state: WorkbenchState = initialState();
  private inflight: Promise<void> = Promise.resolve();

  constructor(
    private readonly client: ServiceApi,
    private readonly onChange: (state: WorkbenchState) => void = () => {},
  ) {}

  /** Resolves once every queued interaction has settled (used by tests). */
  whenIdle(): Promise<void> {
    return this.inflight;
  }

  private notify(): void {
    this.onChange(this.state);
  }

  private run(task: () => Promise<void>): Promise<void> {
    const chained = this.inflight.then(async () => {
      this.state.busy = true;
      this.state.error = null;
      this.notify();
      try {
        await task();
      } catch (err) {
        if (err instanceof ServiceError && err.status === 409) {
          this.state.needsRestart = true;
          this.state.error = `session out of date (${err.code}); restart the session`;
        } else {
          this.state.error = err instanceof Error ? err.message : String(err);
        }
      } finally {
        this.state.busy = false;
        this.notify();
      }
    });
    this.inflight = chained;
    return chained;
  }

  loadModel(docText: string): Promise<void> {
    return this.run(async () => {
      const summary = await this.client.uploadModel(docText);
      const model = await this.client.getModel(summary.id);
      Object.assign(this.state, initialState(), { summary, model, phase: "model-loaded" });
      const firstDimension = model.dimensions[0];
      if (firstDimension) {
        this.state.dimensionId = firstDimension.id;
        this.state.concernId = this.concernsOf(firstDimension.id)[0]?.id ?? null;
      }
    });
  }

  openSession(): Promise<void> {
    return this.run(async () => {
      const model = this.mustModel();
      const info = await this.client.createSession(model.id, this.state.tenant);
      this.state.sessionId = info.id;
      this.state.stateVersion = info.state_version;
      this.state.phase = "session-open";
      this.state.needsRestart = false;
      this.state.lastOp = null;
      this.state.lastDecision = null;
      this.state.blockedHint = null;
      this.state.exported = null;
      await this.refreshSelection();
    });
  }

  selectDimension(dimensionId: string): void {
    this.state.dimensionId = dimensionId;
    this.state.concernId = this.concernsOf(dimensionId)[0]?.id ?? null;
    this.state.guidanceFor = null;
    this.state.guidance = [];
    this.notify();
  }

  selectConcern(concernId: string): void {
    this.state.concernId = concernId;
    this.state.guidanceFor = null;
    this.state.guidance = [];
    this.notify();
  }

  /** Explicit concerns plus the derived per-dimension group of unassigned
   * components (the service derives it as `<dimension>.none` on load). */
  concernsOf(dimensionId: string): ConcernView[] {
    const model = this.state.model;
    const dimension = model?.dimensions.find((d) => d.id === dimensionId);
    if (!model || !dimension) return [];
    const views: ConcernView[] = dimension.concerns.map((cn) => ({
      id: cn.id,
      name: cn.name,
      components: [...cn.components].sort(),
      derived: false,
    }));
    const covered = new Set(dimension.concerns.flatMap((cn) => cn.components));
    const leftover = model.components
      .map((c) => c.id)
      .filter((id) => !covered.has(id))
      .sort();
    if (leftover.length > 0) {
      views.push({
        id: `${dimension.id}.none`,
        name: "None",
        components: leftover,
        derived: true,
      });
    }
    return views;
  }

  private activeConcern(): ConcernView | null {
    const { dimensionId, concernId } = this.state;
    if (!dimensionId || !concernId) return null;
    return this.concernsOf(dimensionId).find((cn) => cn.id === concernId) ?? null;
  }

  private concernEdges(concernId: string): ModelConcern | undefined {
    return this.state.model?.dimensions
      .flatMap((d) => d.concerns)
      .find((cn) => cn.id === concernId);
  }

  componentRows(): ComponentRow[] {
    const concern = this.activeConcern();
    const model = this.state.model;
    if (!concern || !model) return [];
    const labels = new Map(model.components.map((c) => [c.id, c]));
    const selected = new Set(this.state.selection.get(concern.id)?.components ?? []);
    const definition = this.concernEdges(concern.id);
    return concern.components.map((id) => {
      const component = labels.get(id);
      return {
        id,
        label: component?.label || id,
        point: component?.point ?? "",
        selected: selected.has(id),
        requirementHint: definition ? requirementHint(definition, id) : "",
      };
    });
  }

  add(componentId: string): Promise<void> {
    const concernId = this.state.concernId;
    return this.run(async () => {
      if (!concernId) return;
      await this.applyOp({ op: "add", component: componentId, concern: concernId });
    });
  }

  remove(componentId: string): Promise<void> {
    return this.run(async () => {
      await this.applyOp({ op: "delete", component: componentId });
    });
  }

  private async applyOp(op: Operation): Promise<void> {
    const sessionId = this.mustSession();
    const decision = await this.client.applyOp(sessionId, op);
    this.state.lastOp = op;
    this.state.lastDecision = decision;
    if (decision.state_version < this.state.stateVersion) {
      throw new Error(
        `state version went backwards: ${decision.state_version} < ${this.state.stateVersion}`,
      );
    }
    this.state.stateVersion = decision.state_version;
    this.state.blockedHint = null;
    if (decision.verdict === "invalid" && op.op === "add" && op.concern) {
      this.state.blockedHint = await this.blockedRequirements(op.concern, op.component);
    }
    await this.refreshSelection();
  }

  /** "requires x1 and x2" style hint for a rejected add, from the guidance
   * column of the component plus the concern's edge modes. */
  private async blockedRequirements(concernId: string, componentId: string): Promise<string> {
    const model = this.mustModel();
    const entries = await this.client.guidance(model.id, concernId, componentId);
    const definition = this.concernEdges(concernId);
    const parts: string[] = [];
    const seen = new Set<string>();
    for (const entry of entries.filter((e) => e.length === 1)) {
      const edgeId = entry.path[0];
      if (edgeId === undefined || seen.has(edgeId)) continue;
      seen.add(edgeId);
      const edge = definition?.edges.find((e) => e.id === edgeId);
      const members = edge ? [...edge.invertex].sort()
        : [...new Set([entry.source, ...entry.coinput])].sort();
      const word = edge?.mode === "or" ? " or " : " and ";
      parts.push(members.join(word));
    }
    return parts.length > 0 ? `requires ${parts.join("; or ")}` : "";
  }

  showPaths(componentId: string): Promise<void> {
    const concernId = this.state.concernId;
    return this.run(async () => {
      if (!concernId) return;
      const model = this.mustModel();
      this.state.guidance = await this.client.guidance(model.id, concernId, componentId);
      this.state.guidanceFor = componentId;
    });
  }

  exportDocument(): Promise<void> {
    return this.run(async () => {
      this.state.exported = await this.client.getStateText(this.mustSession());
    });
  }

  private async refreshSelection(): Promise<void> {
    const text = await this.client.getStateText(this.mustSession());
    const doc = JSON.parse(text) as CustomizationDocument;
    this.state.selection = new Map(doc.concerns.map((sel) => [sel.id, sel]));
    this.state.tenant = doc.tenant;
  }

  private mustModel(): ModelDocument {
    if (!this.state.model) throw new Error("no model loaded");
    return this.state.model;
  }

  private mustSession(): string {
    if (!this.state.sessionId) throw new Error("no open session");
    return this.state.sessionId;
  }
}

/** Static requirement summary for a component inside one concern. */
export function requirementHint(concern: ModelConcern, componentId: string): string {
  const incoming = concern.edges.filter(
    (e) => e.outvertex.includes(componentId) && e.invertex.length > 0,
  );
  if (incoming.length === 0) return "";
  const parts = incoming.map((e) => {
    const members = [...e.invertex].sort();
    return members.join(e.mode === "and" ? " and " : " or ");
  });
  return `requires ${parts.join("; or ")}`;
}
