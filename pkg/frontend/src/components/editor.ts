/**
 * Editor pane: the working document, the Run / Suggest controls, and
 * the keyboard shortcut. Ctrl+Enter (or Cmd+Enter) asks the gateway
 * for suggestions. The textarea is never clobbered while focused; the
 * text updates underneath only when the server moved it (an accepted
 * preview, a reconnect).
 */

import type { WorkbenchController } from "../controller.js";
import type { SessionStore } from "../store.js";

export function mountEditorPane(
  container: HTMLElement,
  store: SessionStore,
  controller: WorkbenchController,
): () => void {
  container.classList.add("editor");

  const toolbar = document.createElement("div");
  toolbar.className = "editor-toolbar";
  const run = document.createElement("button");
  run.type = "button";
  run.className = "editor-run";
  run.textContent = "Run";
  const suggest = document.createElement("button");
  suggest.type = "button";
  suggest.className = "editor-suggest";
  suggest.textContent = "Suggest";
  suggest.title = "Ctrl+Enter / Cmd+Enter";
  toolbar.append(run, suggest);

  const textarea = document.createElement("textarea");
  textarea.className = "editor-text";
  textarea.spellcheck = false;

  const docId = () => store.snapshot.documents[0]?.doc_id ?? "d1";

  run.addEventListener("click", () => void controller.runCode(docId()));
  suggest.addEventListener("click", () => void controller.requestSuggestions());
  textarea.addEventListener("input", () => {
    controller.editDocument(docId(), textarea.value);
  });
  textarea.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && (event.ctrlKey || event.metaKey)) {
      event.preventDefault();
      void controller.requestSuggestions();
    }
  });

  container.append(toolbar, textarea);

  return () => {
    const doc = store.snapshot.documents[0];
    const text = doc ? doc.text : "";
    const focused = document.activeElement === textarea;
    if (!focused && textarea.value !== text) {
      textarea.value = text;
    }
    const readOnly = store.snapshot.read_only;
    textarea.disabled = readOnly;
    run.disabled = readOnly;
    suggest.disabled = readOnly;
  };
}
