/** Thin typed client; every UI gesture maps to exactly one of these calls. */

import type {
  AdaptResponse,
  CountersDoc,
  DatasetInfo,
  SessionRequest,
  SessionResponse,
  ViewDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ExplorationApi {
  constructor(
    private base: string = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && body.detail) detail = JSON.stringify(body.detail);
      } catch {
        /* no JSON body */
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  private postJson<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  uploadDataset(
    name: string,
    contents: Blob | string,
    format: "ntriples" | "csv",
    predicate?: string,
  ): Promise<DatasetInfo> {
    const form = new FormData();
    form.append("file", contents instanceof Blob ? contents : new Blob([contents]), name);
    form.append("format", format);
    if (predicate) form.append("predicate", predicate);
    return this.request<DatasetInfo>("/datasets", { method: "POST", body: form });
  }

  createSession(request: SessionRequest): Promise<SessionResponse> {
    return this.postJson<SessionResponse>("/sessions", request);
  }

  drill(sessionId: string, nodeId: number): Promise<ViewDoc> {
    return this.postJson<ViewDoc>(`/sessions/${sessionId}/drill`, { node_id: nodeId });
  }

  rollup(sessionId: string): Promise<ViewDoc> {
    return this.postJson<ViewDoc>(`/sessions/${sessionId}/rollup`, {});
  }

  adapt(
    sessionId: string,
    change: { degree?: number; leaves?: number; root_node_id?: number },
  ): Promise<AdaptResponse> {
    return this.postJson<AdaptResponse>(`/sessions/${sessionId}/adapt`, change);
  }

  view(sessionId: string): Promise<ViewDoc> {
    return this.request<ViewDoc>(`/sessions/${sessionId}/view`);
  }

  counters(sessionId: string): Promise<CountersDoc> {
    return this.request<CountersDoc>(`/sessions/${sessionId}/counters`);
  }
}
