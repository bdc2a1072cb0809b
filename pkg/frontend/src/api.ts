/** Thin typed client over the HTTP API; every error surfaces as ApiError. */

import type {
  ApiErrorBody,
  DatasetMeta,
  DatasetPreview,
  ExampleListEntry,
  JobSnapshot,
  RunConfigBody,
  SessionArchive,
  SessionPayload,
} from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly field?: string;
  readonly status: number;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.status = status;
    this.code = body.code;
    this.field = body.field;
  }
}

async function toApiError(response: Response): Promise<ApiError> {
  let body: ApiErrorBody = { code: "unknown", message: `HTTP ${response.status}` };
  try {
    const parsed = await response.json();
    if (parsed && typeof parsed.message === "string") {
      body = parsed as ApiErrorBody;
    }
  } catch {
    // non-JSON error body: keep the fallback
  }
  return new ApiError(response.status, body);
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      throw await toApiError(response);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  uploadDataset(params: {
    csv: string;
    name: string;
    has_header: boolean;
    label_column: string | number;
  }): Promise<DatasetMeta> {
    return this.post("/api/datasets", params);
  }

  previewDataset(datasetId: string): Promise<DatasetPreview> {
    return this.request(`/api/datasets/${datasetId}/preview`);
  }

  submitRun(datasetId: string, config: RunConfigBody): Promise<{ job_id: string }> {
    return this.post("/api/runs", { dataset_id: datasetId, config });
  }

  getJob(jobId: string): Promise<JobSnapshot> {
    return this.request(`/api/runs/${jobId}`);
  }

  getResult(jobId: string): Promise<SessionArchive> {
    return this.request(`/api/runs/${jobId}/result`);
  }

  listExamples(): Promise<{ examples: ExampleListEntry[] }> {
    return this.request("/api/examples");
  }

  getExample(exampleId: string): Promise<SessionArchive> {
    return this.request(`/api/examples/${exampleId}`);
  }

  createSession(params: {
    job_id?: string;
    example_id?: string;
    word_limit: number;
    model_id: string;
    provider: "http" | "mock";
    api_key?: string;
  }): Promise<SessionPayload> {
    return this.post("/api/chat/sessions", params);
  }

  sendMessage(sessionId: string, question: string): Promise<{ answer: string } & SessionPayload> {
    return this.post(`/api/chat/sessions/${sessionId}/messages`, { question });
  }

  /** Raw export body: exactly what the download button saves to disk. */
  async exportSession(sessionId: string): Promise<string> {
    const response = await this.fetchFn(`${this.base}/api/chat/sessions/${sessionId}/export`);
    if (!response.ok) {
      throw await toApiError(response);
    }
    return response.text();
  }

  async importSession(
    archiveJson: string,
    provider: "http" | "mock" = "mock",
    apiKey?: string,
  ): Promise<SessionPayload> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (apiKey) {
      headers["Authorization"] = `Bearer ${apiKey}`;
    }
    const response = await this.fetchFn(
      `${this.base}/api/sessions/import?provider=${provider}`,
      { method: "POST", headers, body: archiveJson },
    );
    if (!response.ok) {
      throw await toApiError(response);
    }
    return (await response.json()) as SessionPayload;
  }
}
