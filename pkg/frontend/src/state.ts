// Console session state. Everything here derives from service responses:
// the history cache mirrors /v1/history order and answers are stored
// verbatim, never edited.

import { ApiError, AskResponse, HistoryEntry, ServiceClient } from "./api.js";

export type SubmitOutcome =
  | { kind: "answered"; response: AskResponse }
  | { kind: "rejected"; status: number; detail: string }
  | { kind: "network_error"; message: string };

export type HistoryOutcome =
  | { kind: "loaded"; entries: HistoryEntry[] }
  | { kind: "offline"; message: string };

export class ConsoleSession {
  rephraseEnabled = true;
  historyCache: HistoryEntry[] = [];
  private inFlight = new Map<string, Promise<SubmitOutcome>>();

  constructor(readonly client: ServiceClient) {}

  canSubmit(text: string): boolean {
    return text.trim().length > 0;
  }

  /**
   * Submit one query. A resubmission of the same query while its request
   * is still in flight joins the pending request instead of issuing a
   * second one (at most one in-flight request per query).
   */
  submit(text: string): Promise<SubmitOutcome> {
    const query = text.trim();
    if (!query) {
      return Promise.resolve({ kind: "rejected", status: 0, detail: "enter a question" });
    }
    const pending = this.inFlight.get(query);
    if (pending) return pending;

    const request = this.client
      .ask(query, this.rephraseEnabled)
      .then((response): SubmitOutcome => ({ kind: "answered", response }))
      .catch((err): SubmitOutcome => {
        if (err instanceof ApiError) {
          return { kind: "rejected", status: err.status, detail: err.message };
        }
        return { kind: "network_error", message: String(err) };
      })
      .finally(() => this.inFlight.delete(query));
    this.inFlight.set(query, request);
    return request;
  }

  inFlightCount(): number {
    return this.inFlight.size;
  }

  /** Refresh the local history cache from the service (newest first). */
  async refreshHistory(limit = 50): Promise<HistoryOutcome> {
    try {
      const entries = await this.client.history(limit);
      this.historyCache = entries;
      return { kind: "loaded", entries };
    } catch (err) {
      return { kind: "offline", message: String(err) };
    }
  }
}
