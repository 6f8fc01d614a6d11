/** Thin typed client over the annotation API.
 *
 * The fetch function is injectable so the contract tests can run against
 * a stubbed server with no network or DOM.
 */

import type {
  AgreementResponse,
  AnnotationRecordJson,
  InstanceResponse,
  ProgressResponse,
  QueueResponse,
  Schema,
} from "./types";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export class OfflineError extends Error {
  constructor(cause: unknown) {
    super(`server unreachable: ${String(cause)}`);
  }
}

export class ApiClient {
  constructor(
    private baseUrl = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (cause) {
      throw new OfflineError(cause);
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: unknown };
        if (body.detail !== undefined) detail = JSON.stringify(body.detail);
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  getSchema(): Promise<Schema> {
    return this.request<Schema>("/api/schema");
  }

  getQueue(annotator: string, status: "all" | "unlabeled" = "all"): Promise<QueueResponse> {
    const params = new URLSearchParams({ annotator, status });
    return this.request<QueueResponse>(`/api/instances?${params}`);
  }

  getInstance(id: string, annotator: string): Promise<InstanceResponse> {
    const params = new URLSearchParams({ annotator });
    return this.request<InstanceResponse>(`/api/instances/${encodeURIComponent(id)}?${params}`);
  }

  submitAnnotation(record: AnnotationRecordJson): Promise<AnnotationRecordJson> {
    return this.request<AnnotationRecordJson>("/api/annotations", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(record),
    });
  }

  getAgreement(a: string, b: string, subset: string): Promise<AgreementResponse> {
    const params = new URLSearchParams({ a, b, subset });
    return this.request<AgreementResponse>(`/api/agreement?${params}`);
  }

  getProgress(annotator: string): Promise<ProgressResponse> {
    const params = new URLSearchParams({ annotator });
    return this.request<ProgressResponse>(`/api/progress?${params}`);
  }
}
