// Core logic of the title-suggestion userscript. Kept free of top-level side
// effects so tests can import it against a fixture document; main.ts is the
// entry point that runs it on the live page.

// Selectors live here because the host page's DOM may change; fixing a
// redesign should be a one-line edit.
export interface UiConfig {
  backendUrl: string;
  titleSelector: string;
  bodySelector: string;
  buttonLabel: string;
}

export const DEFAULT_CONFIG: UiConfig = {
  backendUrl: "http://127.0.0.1:8765/api/v1/suggest",
  titleSelector: "#issue_title",
  bodySelector: "#issue_body",
  buttonLabel: "Get Title Suggestion",
};

export const BUTTON_ID = "title-suggest-button";
export const STATUS_ID = "title-suggest-status";

export type FillOutcome = "filled" | "empty" | "error" | "busy";

function setStatus(doc: Document, message: string): void {
  const status = doc.getElementById(STATUS_ID);
  if (status) {
    status.textContent = message;
  }
}

/**
 * Insert the suggestion button (plus an inline status element) next to the
 * title field. Idempotent: repeated calls leave exactly one button. Returns
 * null with a console diagnostic when either selector matches nothing.
 */
export function injectButton(doc: Document, cfg: UiConfig = DEFAULT_CONFIG): HTMLButtonElement | null {
  const existing = doc.getElementById(BUTTON_ID);
  if (existing instanceof HTMLButtonElement) {
    return existing;
  }
  const titleField = doc.querySelector<HTMLInputElement>(cfg.titleSelector);
  const bodyField = doc.querySelector<HTMLTextAreaElement>(cfg.bodySelector);
  if (!titleField || !bodyField) {
    console.warn(
      `[title-suggest] page has no match for ${!titleField ? cfg.titleSelector : cfg.bodySelector}; not injecting`,
    );
    return null;
  }
  const button = doc.createElement("button");
  button.id = BUTTON_ID;
  button.type = "button"; // never submits the issue form
  button.textContent = cfg.buttonLabel;
  const status = doc.createElement("span");
  status.id = STATUS_ID;
  titleField.insertAdjacentElement("afterend", status);
  titleField.insertAdjacentElement("afterend", button);
  button.addEventListener("click", () => {
    void requestAndFill(doc, cfg);
  });
  return button;
}

/**
 * Send the description to the backend and fill the title field with the
 * suggestion, firing the field's input event so the page registers the
 * change. The button is disabled while a request is in flight (one request
 * at a time); errors surface as inline status text and leave the title
 * field untouched. An empty description makes no network call.
 */
export async function requestAndFill(doc: Document, cfg: UiConfig = DEFAULT_CONFIG): Promise<FillOutcome> {
  const button = doc.getElementById(BUTTON_ID);
  const titleField = doc.querySelector<HTMLInputElement>(cfg.titleSelector);
  const bodyField = doc.querySelector<HTMLTextAreaElement>(cfg.bodySelector);
  if (!titleField || !bodyField) {
    console.warn("[title-suggest] form fields disappeared; cannot fill");
    return "error";
  }
  if (button instanceof HTMLButtonElement && button.disabled) {
    return "busy";
  }
  const description = bodyField.value;
  if (!description.trim()) {
    setStatus(doc, "Write a description first, then ask for a title.");
    return "empty";
  }
  if (button instanceof HTMLButtonElement) {
    button.disabled = true;
  }
  setStatus(doc, "Asking the backend for a title…");
  try {
    const response = await fetch(cfg.backendUrl, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ description }),
    });
    if (!response.ok) {
      setStatus(doc, `Suggestion failed (HTTP ${response.status}).`);
      return "error";
    }
    const payload: unknown = await response.json();
    const title = (payload as { title?: unknown }).title;
    if (typeof title !== "string") {
      setStatus(doc, "Suggestion failed (malformed backend response).");
      return "error";
    }
    titleField.value = title;
    titleField.dispatchEvent(new Event("input", { bubbles: true }));
    setStatus(doc, "Title filled — edit it as you like.");
    return "filled";
  } catch {
    setStatus(doc, "Suggestion failed (network error).");
    return "error";
  } finally {
    if (button instanceof HTMLButtonElement) {
      button.disabled = false;
    }
  }
}
