// DOM renderers. Answer strings always land in textContent, so what the
// user sees is byte-identical to what the service returned.

import { AskResponse, HistoryEntry } from "./api.js";

function el(doc: Document, tag: string, className: string, text?: string): HTMLElement {
  const node = doc.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function rephraseBadgeText(status: AskResponse["rephrase_status"]): string {
  if (status === "ok") return "rephrased";
  if (status === "skipped") return "rephrase off";
  return "rephrase unavailable";
}

/**
 * One answer card: the local-tone answer always, and (when rephrasing was
 * requested) the rephrased answer side by side with a status badge.
 */
export function renderAnswerCard(
  doc: Document,
  response: AskResponse,
  rephraseRequested: boolean,
): HTMLElement {
  const card = el(doc, "article", "answer-card");
  card.dataset.requestId = response.id;

  card.appendChild(el(doc, "h3", "query", response.normalized_query));

  const columns = el(doc, "div", "columns");
  const local = el(doc, "section", "variant local");
  local.appendChild(el(doc, "h4", "variant-label", "local tone"));
  local.appendChild(el(doc, "p", "answer-text", response.raw_answer));
  columns.appendChild(local);

  if (rephraseRequested) {
    const polished = el(doc, "section", "variant rephrased");
    const label = el(doc, "h4", "variant-label", "rephrased");
    label.appendChild(el(doc, "span", `badge ${response.rephrase_status}`,
      rephraseBadgeText(response.rephrase_status)));
    polished.appendChild(label);
    if (response.rephrased_answer !== null) {
      polished.appendChild(el(doc, "p", "answer-text", response.rephrased_answer));
    } else {
      polished.appendChild(el(doc, "p", "answer-missing", "only the local-tone answer is available"));
    }
    columns.appendChild(polished);
  }

  card.appendChild(columns);
  card.appendChild(el(doc, "footer", "timing",
    `generated in ${response.timings.generate_ms.toFixed(0)} ms`));
  return card;
}

/** History list in exactly the order the service returned (newest first). */
export function renderHistoryList(doc: Document, entries: HistoryEntry[]): HTMLElement {
  const list = el(doc, "ol", "history-list");
  if (entries.length === 0) {
    list.appendChild(el(doc, "li", "history-empty", "no queries yet"));
    return list;
  }
  for (const entry of entries) {
    const item = el(doc, "li", "history-entry");
    item.dataset.entryId = entry.id;
    item.appendChild(el(doc, "span", "history-query", entry.request.query));
    item.appendChild(el(doc, "span", "history-answer", entry.response.raw_answer));
    item.appendChild(el(doc, "span", `badge ${entry.response.rephrase_status}`,
      rephraseBadgeText(entry.response.rephrase_status)));
    list.appendChild(item);
  }
  return list;
}

export function renderValidationMessage(doc: Document, detail: string): HTMLElement {
  return el(doc, "p", "validation-error", detail);
}

/** Network-failure panel with a retry button the caller wires up. */
export function renderRetryPanel(doc: Document, message: string, onRetry: () => void): HTMLElement {
  const panel = el(doc, "div", "retry-panel");
  panel.appendChild(el(doc, "p", "retry-message", `request failed: ${message}`));
  const button = el(doc, "button", "retry-button", "retry");
  button.addEventListener("click", onRetry);
  panel.appendChild(button);
  return panel;
}

export function renderOfflineBanner(doc: Document, message: string): HTMLElement {
  return el(doc, "div", "offline-banner", `service unreachable: ${message}`);
}
