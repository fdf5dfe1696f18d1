// Shared canned service responses. The answer strings mirror the
// service's packaged stub fixtures, so snapshot comparisons exercise the
// real payloads.

import { AskResponse, HistoryEntry } from "../src/api.js";

export const PADDY_RAW =
  "apply urea 25 kilograms potash 15 kilograms micronutrient mixture 5 kilograms per acre";
export const PADDY_REPHRASED =
  "Apply a fertilizer blend of 25 kilograms urea, 15 kilograms potash, and 5 kilograms micronutrient mixture per acre.";
export const LEAF_FOLDER_RAW =
  "recommended for spray cartaphydrochloride 2 grams per litre of water";

export function askResponse(overrides: Partial<AskResponse> = {}): AskResponse {
  return {
    id: "01J000000000000000000000AA",
    normalized_query: "paddy top dressing",
    raw_answer: PADDY_RAW,
    rephrased_answer: PADDY_REPHRASED,
    rephrase_status: "ok",
    timings: { generate_ms: 1.2, rephrase_ms: 0.8 },
    ...overrides,
  };
}

export function historyEntry(
  id: string,
  query: string,
  response: AskResponse,
): HistoryEntry {
  return {
    id,
    timestamp: "2024-06-01T10:00:00.000Z",
    request: { query, rephrase: true, metadata: null },
    response: { ...response, id },
    models: { generate: "stub-generate", rephrase: "stub-rephrase" },
  };
}

type CannedResponse = { status: number; body: unknown };

/** Install a fetch stub; returns the list of calls it saw. */
export function stubFetch(
  route: (url: string, init?: RequestInit) => CannedResponse | Promise<CannedResponse>,
): Array<{ url: string; init?: RequestInit }> {
  const calls: Array<{ url: string; init?: RequestInit }> = [];
  globalThis.fetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    calls.push({ url, init });
    const canned = await route(url, init);
    return new Response(JSON.stringify(canned.body), {
      status: canned.status,
      headers: { "Content-Type": "application/json" },
    });
  }) as typeof fetch;
  return calls;
}
