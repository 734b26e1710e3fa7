/**
 * Suggestion tray: one collapsible card per live suggestion. Collapsed
 * cards show only the category-prefixed summary; expanded cards add the
 * code block (with a copy control), explanation bullets, and the action
 * row. The Preview action exists only when the condition allows it.
 */

import type { WorkbenchController } from "../controller.js";
import type { SessionStore } from "../store.js";
import type { SuggestionPayload } from "../types.js";

function button(label: string, className: string, onClick: () => void): HTMLButtonElement {
  const el = document.createElement("button");
  el.type = "button";
  el.className = className;
  el.textContent = label;
  el.addEventListener("click", onClick);
  return el;
}

function renderCard(
  suggestion: SuggestionPayload,
  store: SessionStore,
  controller: WorkbenchController,
): HTMLElement {
  const card = document.createElement("article");
  card.className = `card ${suggestion.state} origin-${suggestion.origin}`;
  card.dataset.suggestionId = suggestion.suggestion_id;

  const header = document.createElement("button");
  header.type = "button";
  header.className = "card-header";
  header.textContent = suggestion.summary;
  header.title = suggestion.state === "collapsed" ? "Expand" : "Collapse";
  header.addEventListener("click", () => {
    if (suggestion.state === "collapsed") {
      void controller.expandSuggestion(suggestion.suggestion_id);
    } else {
      void controller.collapseSuggestion(suggestion.suggestion_id);
    }
  });
  card.append(header);

  if (suggestion.state !== "expanded") return card;

  const body = document.createElement("div");
  body.className = "card-body";

  if (suggestion.code !== null && suggestion.code !== "") {
    const codeWrap = document.createElement("div");
    codeWrap.className = "card-code";
    const pre = document.createElement("pre");
    const code = document.createElement("code");
    code.textContent = suggestion.code;
    pre.append(code);
    codeWrap.append(
      pre,
      button("Copy", "copy-code", () => void controller.copySuggestion(suggestion.suggestion_id)),
    );
    body.append(codeWrap);
  }

  if (suggestion.explanation.length > 0) {
    const list = document.createElement("ul");
    list.className = "card-explanation";
    for (const line of suggestion.explanation) {
      const item = document.createElement("li");
      item.textContent = line;
      list.append(item);
    }
    body.append(list);
  }

  const actions = document.createElement("div");
  actions.className = "card-actions";
  if (store.snapshot.condition.preview_enabled) {
    const pending = store.pendingPreviewFor === suggestion.suggestion_id;
    const preview = button("Preview", "card-preview", () =>
      void controller.requestPreview(suggestion.suggestion_id),
    );
    preview.disabled = pending || store.snapshot.read_only;
    if (pending) preview.textContent = "Previewing…";
    actions.append(preview);
  }
  const accept = button("Accept", "card-accept", () =>
    void controller.acceptSuggestion(suggestion.suggestion_id),
  );
  const remove = button("Delete", "card-delete", () =>
    void controller.deleteSuggestion(suggestion.suggestion_id),
  );
  accept.disabled = store.snapshot.read_only;
  remove.disabled = store.snapshot.read_only;
  actions.append(accept, remove);
  body.append(actions);
  card.append(body);
  return card;
}

export function mountSuggestionTray(
  container: HTMLElement,
  store: SessionStore,
  controller: WorkbenchController,
): () => void {
  container.classList.add("tray");
  return () => {
    container.replaceChildren();

    const head = document.createElement("div");
    head.className = "tray-head";
    const title = document.createElement("h2");
    title.textContent = "Suggestions";
    head.append(title);
    const clear = button("Clear all", "tray-clear", () => void controller.clearSuggestions());
    clear.disabled = store.snapshot.read_only;
    head.append(clear);
    container.append(head);

    const live = store.liveSuggestions();
    if (live.length === 0) {
      const empty = document.createElement("p");
      empty.className = "tray-empty";
      empty.textContent = store.snapshot.condition.proactive_enabled
        ? "No suggestions yet. They appear when you pause, or on request."
        : "No suggestions yet. Use the Suggest button to ask for some.";
      container.append(empty);
      return;
    }
    for (const suggestion of live) {
      container.append(renderCard(suggestion, store, controller));
    }
  };
}
