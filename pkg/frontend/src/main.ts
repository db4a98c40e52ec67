import { ServiceClient } from "./api";
import { render } from "./view";
import { Workbench } from "./workbench";

export interface MountedWorkbench {
  workbench: Workbench;
  client: ServiceClient;
}

/** Wire a workbench to a root element; re-renders on every state change. */
export function mount(root: HTMLElement, serviceUrl: string): MountedWorkbench {
  const client = new ServiceClient(serviceUrl);
  const workbench = new Workbench(client, () => render(root, workbench));
  render(root, workbench);
  return { workbench, client };
}

function defaultServiceUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("service") ?? "http://127.0.0.1:8080";
}

const root = typeof document !== "undefined" ? document.getElementById("app") : null;
if (root) {
  mount(root, defaultServiceUrl());
}
