// DOM rendering: a full re-render per state change keeps the view a pure
// function of the workbench state. Elements carry data-testid hooks so the
// scripted end-to-end session can drive real clicks.

import type { Workbench, WorkbenchState } from "./workbench";

function el(tag: string, attrs: Record<string, string> = {}, text = ""): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text) node.textContent = text;
  return node;
}

function section(title: string, testid: string): HTMLElement {
  const box = el("section", { "data-testid": testid });
  box.appendChild(el("h2", {}, title));
  return box;
}

export function render(root: HTMLElement, wb: Workbench): void {
  const state = wb.state;
  root.innerHTML = "";
  root.appendChild(renderModelPanel(wb, state));
  if (state.error) {
    const err = el("div", { "data-testid": "error", class: "error" }, state.error);
    if (state.needsRestart) {
      const retry = el("button", { "data-testid": "restart-session" }, "restart session");
      retry.addEventListener("click", () => void wb.openSession());
      err.appendChild(retry);
    }
    root.appendChild(err);
  }
  if (state.phase === "empty") return;

  root.appendChild(renderSessionPanel(wb, state));
  if (state.phase !== "session-open") return;

  root.appendChild(renderNavigation(wb, state));
  root.appendChild(renderComponents(wb, state));
  if (state.lastDecision) root.appendChild(renderDecision(state));
  if (state.guidanceFor) root.appendChild(renderGuidance(state));
  root.appendChild(renderExport(wb, state));
}

function renderModelPanel(wb: Workbench, state: WorkbenchState): HTMLElement {
  const box = section("Model", "model-panel");
  const input = el("textarea", {
    "data-testid": "model-input",
    rows: "6",
    placeholder: "paste a model document (JSON)",
  }) as HTMLTextAreaElement;
  const load = el("button", { "data-testid": "load-model" }, "load model") as HTMLButtonElement;
  load.disabled = state.busy;
  load.addEventListener("click", () => void wb.loadModel(input.value));
  box.appendChild(input);
  box.appendChild(load);
  if (state.summary) {
    box.appendChild(el(
      "p",
      { "data-testid": "model-summary" },
      `${state.summary.id}@${state.summary.revision}: ` +
        `${state.summary.components} components, ${state.summary.concerns} concerns`,
    ));
  }
  return box;
}

function renderSessionPanel(wb: Workbench, state: WorkbenchState): HTMLElement {
  const box = section("Session", "session-panel");
  const create = el(
    "button",
    { "data-testid": "create-session" },
    state.sessionId ? "restart session" : "create session",
  ) as HTMLButtonElement;
  create.disabled = state.busy;
  create.addEventListener("click", () => void wb.openSession());
  box.appendChild(create);
  if (state.sessionId) {
    box.appendChild(el("span", { "data-testid": "session-id" }, state.sessionId));
    box.appendChild(el(
      "span",
      { "data-testid": "state-version" },
      `v${state.stateVersion}`,
    ));
  }
  return box;
}

function renderNavigation(wb: Workbench, state: WorkbenchState): HTMLElement {
  const box = section("Concerns", "navigation");
  const dimensions = el("ul", { "data-testid": "dimensions" });
  for (const dimension of state.model?.dimensions ?? []) {
    const item = el("li", {
      "data-testid": `dimension-${dimension.id}`,
      class: dimension.id === state.dimensionId ? "active" : "",
    }, `${dimension.name} (${dimension.id})`);
    item.addEventListener("click", () => {
      wb.selectDimension(dimension.id);
    });
    dimensions.appendChild(item);
  }
  box.appendChild(dimensions);
  const concerns = el("ul", { "data-testid": "concerns" });
  if (state.dimensionId) {
    for (const concern of wb.concernsOf(state.dimensionId)) {
      const item = el("li", {
        "data-testid": `concern-${concern.id}`,
        class: concern.id === state.concernId ? "active" : "",
      }, `${concern.name} (${concern.components.length})`);
      item.addEventListener("click", () => {
        wb.selectConcern(concern.id);
      });
      concerns.appendChild(item);
    }
  }
  box.appendChild(concerns);
  return box;
}

function renderComponents(wb: Workbench, state: WorkbenchState): HTMLElement {
  const box = section("Components", "components");
  const list = el("ul");
  for (const row of wb.componentRows()) {
    const item = el("li", {
      "data-testid": `component-${row.id}`,
      class: row.selected ? "selected" : "available",
    });
    item.appendChild(el("span", { class: "name" }, `${row.label} [${row.id}]`));
    item.appendChild(el(
      "span",
      { "data-testid": `status-${row.id}`, class: "status" },
      row.selected ? "selected" : "available",
    ));
    if (row.requirementHint) {
      item.appendChild(el("span", { class: "hint" }, row.requirementHint));
    }
    const action = el(
      "button",
      { "data-testid": `${row.selected ? "remove" : "add"}-${row.id}` },
      row.selected ? "remove" : "add",
    ) as HTMLButtonElement;
    action.disabled = state.busy;
    action.addEventListener("click", () => {
      void (row.selected ? wb.remove(row.id) : wb.add(row.id));
    });
    item.appendChild(action);
    const paths = el("button", { "data-testid": `paths-${row.id}` }, "requirement paths");
    paths.addEventListener("click", () => void wb.showPaths(row.id));
    item.appendChild(paths);
    list.appendChild(item);
  }
  box.appendChild(list);
  return box;
}

function renderDecision(state: WorkbenchState): HTMLElement {
  const decision = state.lastDecision!;
  const op = state.lastOp!;
  const box = el("div", {
    "data-testid": "decision",
    class: `decision ${decision.verdict}`,
  });
  const what = `${op.op} ${op.component}${op.concern ? ` in ${op.concern}` : ""}`;
  let detail = `${decision.verdict} (${decision.reason})`;
  if (decision.satisfied_edge) {
    detail += ` via ${decision.satisfied_edge}`;
  }
  if (decision.recorded_supports.length > 0) {
    detail += ` with ${decision.recorded_supports.join(", ")}`;
  }
  if (decision.removed_edges.length > 0) {
    detail += `, removed ${decision.removed_edges.join(", ")}`;
  }
  box.appendChild(el("span", { "data-testid": "decision-text" }, `${what}: ${detail}`));
  if (state.blockedHint) {
    box.appendChild(el("span", { "data-testid": "blocked-hint" }, state.blockedHint));
  }
  return box;
}

function renderGuidance(state: WorkbenchState): HTMLElement {
  const box = section(`Requirement paths into ${state.guidanceFor}`, "guidance");
  const table = el("table", { "data-testid": "guidance-table" });
  let lastLength = 0;
  for (const entry of state.guidance) {
    if (entry.length !== lastLength) {
      lastLength = entry.length;
      const header = el("tr", { class: "group" });
      header.appendChild(el("th", { colspan: "3" }, `length ${entry.length}`));
      table.appendChild(header);
    }
    const tr = el("tr", { "data-testid": "guidance-row" });
    tr.appendChild(el("td", {}, `${entry.source} -> ${entry.target}`));
    tr.appendChild(el("td", {}, entry.path.join(", ")));
    tr.appendChild(el("td", {}, entry.coinput.length > 0
      ? `alongside ${entry.coinput.join(", ")}` : ""));
    table.appendChild(tr);
  }
  if (state.guidance.length === 0) {
    const tr = el("tr");
    tr.appendChild(el("td", {}, "no incoming requirement paths"));
    table.appendChild(tr);
  }
  box.appendChild(table);
  return box;
}

function renderExport(wb: Workbench, state: WorkbenchState): HTMLElement {
  const box = section("Export", "export-panel");
  const button = el("button", { "data-testid": "export" }, "export customization") as HTMLButtonElement;
  button.disabled = state.busy;
  button.addEventListener("click", () => void wb.exportDocument());
  box.appendChild(button);
  if (state.exported !== null) {
    const output = el("pre", { "data-testid": "export-output" });
    output.textContent = state.exported;
    box.appendChild(output);
    const download = el("a", {
      "data-testid": "download",
      download: `${state.tenant}-customization.json`,
      href: `data:application/json;charset=utf-8,${encodeURIComponent(state.exported)}`,
    }, "download");
    box.appendChild(download);
  }
  return box;
}
