// Thin client for the customization service. Every response passes through
// here and is appended to `log`, so tests can assert that the UI never shows
// a verdict the service did not produce.

import type {
  Decision,
  GuidanceEntry,
  ModelDocument,
  ModelSummary,
  Operation,
  SessionInfo,
} from "./types";

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export interface NetworkLogEntry {
  method: string;
  path: string;
  status: number;
  body: unknown;
}

/** What the workbench needs from the service; tests may stub it. */
export interface ServiceApi {
  readonly log: NetworkLogEntry[];
  uploadModel(docText: string): Promise<ModelSummary>;
  getModel(modelId: string): Promise<ModelDocument>;
  createSession(modelId: string, tenant?: string): Promise<SessionInfo>;
  applyOp(sessionId: string, op: Operation): Promise<Decision>;
  getStateText(sessionId: string): Promise<string>;
  guidance(modelId: string, concernId: string, target?: string): Promise<GuidanceEntry[]>;
}

interface Reply {
  status: number;
  text: string;
}

export class ServiceClient implements ServiceApi {
  readonly log: NetworkLogEntry[] = [];

  constructor(readonly baseUrl: string) {}

  private async request(method: string, path: string, body?: string): Promise<Reply> {
    const response = await fetch(this.baseUrl + path, {
      method,
      body,
      headers: body !== undefined ? { "content-type": "application/json" } : undefined,
    });
    const text = await response.text();
    let parsed: unknown = text;
    try {
      parsed = JSON.parse(text);
    } catch {
      // keep raw text for non-JSON bodies
    }
    this.log.push({ method, path, status: response.status, body: parsed });
    return { status: response.status, text };
  }

  private async json<T>(method: string, path: string, body?: string,
                        accept: number[] = [200]): Promise<T> {
    const reply = await this.request(method, path, body);
    if (!accept.includes(reply.status)) {
      throw this.toError(reply);
    }
    return JSON.parse(reply.text) as T;
  }

  private toError(reply: Reply): ServiceError {
    let code = `HTTP${reply.status}`;
    let message = reply.text;
    try {
      const body = JSON.parse(reply.text) as { error?: string; message?: string };
      if (body.error) code = body.error;
      if (body.message) message = body.message;
    } catch {
      // non-JSON error body
    }
    return new ServiceError(reply.status, code, message);
  }

  uploadModel(docText: string): Promise<ModelSummary> {
    return this.json<ModelSummary>("POST", "/v1/models", docText, [201]);
  }

  getModel(modelId: string): Promise<ModelDocument> {
    return this.json<ModelDocument>("GET", `/v1/models/${modelId}`);
  }

  createSession(modelId: string, tenant = "default"): Promise<SessionInfo> {
    return this.json<SessionInfo>(
      "POST",
      `/v1/models/${modelId}/sessions`,
      JSON.stringify({ tenant }),
      [201],
    );
  }

  applyOp(sessionId: string, op: Operation): Promise<Decision> {
    return this.json<Decision>(
      "POST",
      `/v1/sessions/${sessionId}/ops`,
      JSON.stringify(op),
    );
  }

  /** Raw canonical document bytes; exports must not re-serialize. */
  async getStateText(sessionId: string): Promise<string> {
    const reply = await this.request("GET", `/v1/sessions/${sessionId}`);
    if (reply.status !== 200) {
      throw this.toError(reply);
    }
    return reply.text;
  }

  guidance(modelId: string, concernId: string, target?: string): Promise<GuidanceEntry[]> {
    const query = target === undefined ? "" : `?target=${encodeURIComponent(target)}`;
    return this.json<GuidanceEntry[]>(
      "GET",
      `/v1/models/${modelId}/concerns/${concernId}/paths${query}`,
    );
  }
}
