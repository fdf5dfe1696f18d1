// Typed client for the query-resolution service /v1 API.

export type RephraseStatus =
  | "ok"
  | "skipped"
  | "fallback_provider_error"
  | "fallback_timeout";

export type AskResponse = {
  id: string;
  normalized_query: string;
  raw_answer: string;
  rephrased_answer: string | null;
  rephrase_status: RephraseStatus;
  timings: { generate_ms: number; rephrase_ms: number | null };
};

export type AskMetadata = {
  crop?: string;
  sector?: string;
  season?: string;
};

export type HistoryEntry = {
  id: string;
  timestamp: string;
  request: { query: string; rephrase: boolean; metadata: AskMetadata | null };
  response: AskResponse;
  models: { generate: string; rephrase: string };
};

export type HealthResponse = {
  status: "ok" | "degraded" | "down";
  providers: Record<string, string>;
};

/** Non-2xx response from the service (carries the HTTP status). */
export class ApiError extends Error {
  constructor(public readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

async function errorDetail(res: Response): Promise<string> {
  try {
    const body = await res.json();
    if (body && typeof body.detail === "string") return body.detail;
    return JSON.stringify(body);
  } catch {
    return res.statusText || `HTTP ${res.status}`;
  }
}

export class ServiceClient {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/+$/, "") + path;
  }

  async ask(query: string, rephrase: boolean, metadata?: AskMetadata): Promise<AskResponse> {
    const res = await fetch(this.url("/v1/ask"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ query, rephrase, metadata: metadata ?? null }),
    });
    if (!res.ok) throw new ApiError(res.status, await errorDetail(res));
    return (await res.json()) as AskResponse;
  }

  async history(limit: number): Promise<HistoryEntry[]> {
    const res = await fetch(this.url(`/v1/history?limit=${limit}`));
    if (!res.ok) throw new ApiError(res.status, await errorDetail(res));
    return (await res.json()) as HistoryEntry[];
  }

  async health(): Promise<HealthResponse> {
    const res = await fetch(this.url("/v1/health"));
    if (!res.ok) throw new ApiError(res.status, await errorDetail(res));
    return (await res.json()) as HealthResponse;
  }
}
