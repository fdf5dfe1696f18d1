// Console wiring: form on the left, answer cards in the middle, history
// on the right. All displayed text comes straight from the service.

import { ServiceClient } from "./api.js";
import { resolveServiceUrl } from "./config.js";
import { ConsoleSession } from "./state.js";
import {
  renderAnswerCard,
  renderHistoryList,
  renderOfflineBanner,
  renderRetryPanel,
  renderValidationMessage,
} from "./render.js";

function mustFind<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

const serviceUrl = resolveServiceUrl(window.location.search, window.localStorage);
const session = new ConsoleSession(new ServiceClient(serviceUrl));

const form = mustFind<HTMLFormElement>("ask-form");
const input = mustFind<HTMLTextAreaElement>("query-input");
const submitButton = mustFind<HTMLButtonElement>("submit-button");
const rephraseToggle = mustFind<HTMLInputElement>("rephrase-toggle");
const feedback = mustFind<HTMLDivElement>("form-feedback");
const answers = mustFind<HTMLDivElement>("answers");
const historyPanel = mustFind<HTMLDivElement>("history-panel");
const refreshButton = mustFind<HTMLButtonElement>("refresh-history");
const serviceLabel = mustFind<HTMLSpanElement>("service-url");

serviceLabel.textContent = serviceUrl;
rephraseToggle.checked = session.rephraseEnabled;

function syncSubmitEnabled(): void {
  submitButton.disabled = !session.canSubmit(input.value);
}

async function refreshHistory(): Promise<void> {
  const outcome = await session.refreshHistory(50);
  historyPanel.replaceChildren(
    outcome.kind === "loaded"
      ? renderHistoryList(document, outcome.entries)
      : renderOfflineBanner(document, outcome.message),
  );
}

async function submitCurrent(): Promise<void> {
  const text = input.value;
  if (!session.canSubmit(text)) return;
  const rephraseRequested = session.rephraseEnabled;
  feedback.replaceChildren();
  submitButton.disabled = true;
  try {
    const outcome = await session.submit(text);
    if (outcome.kind === "answered") {
      answers.prepend(renderAnswerCard(document, outcome.response, rephraseRequested));
      input.value = "";
      await refreshHistory();
    } else if (outcome.kind === "rejected") {
      feedback.replaceChildren(renderValidationMessage(document, outcome.detail));
    } else {
      feedback.replaceChildren(
        renderRetryPanel(document, outcome.message, () => void submitCurrent()),
      );
    }
  } finally {
    syncSubmitEnabled();
  }
}

form.addEventListener("submit", (event) => {
  event.preventDefault();
  void submitCurrent();
});
input.addEventListener("input", syncSubmitEnabled);
rephraseToggle.addEventListener("change", () => {
  session.rephraseEnabled = rephraseToggle.checked;
});
refreshButton.addEventListener("click", () => void refreshHistory());

syncSubmitEnabled();
void refreshHistory();
