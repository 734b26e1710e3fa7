/**
 * Workbench composition: editor and output on the left, suggestions
 * and chat in a right-hand panel, the diff preview as an overlay.
 */

import type { SessionClient } from "./api.js";
import { mountSuggestionTray } from "./components/cards.js";
import { mountChatPanel } from "./components/chat.js";
import { mountDiffPanel } from "./components/diff.js";
import { mountEditorPane } from "./components/editor.js";
import { mountOutputPane } from "./components/output.js";
import { mountToastRegion } from "./components/toast.js";
import { WorkbenchController, type ClipboardWrite } from "./controller.js";
import { SessionStore } from "./store.js";
import type { SessionSnapshot } from "./types.js";

export interface Workbench {
  store: SessionStore;
  controller: WorkbenchController;
  dispose(): void;
}

export interface WorkbenchOptions {
  clipboard?: ClipboardWrite;
  /** Skip opening the push stream (tests drive frames directly). */
  connect?: boolean;
}

function el(tag: string, className: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  return node;
}

export function mountWorkbench(
  root: HTMLElement,
  client: SessionClient,
  snapshot: SessionSnapshot,
  options: WorkbenchOptions = {},
): Workbench {
  const store = new SessionStore(snapshot);
  const controller = new WorkbenchController(client, store, {
    clipboard: options.clipboard,
  });

  root.replaceChildren();
  root.classList.add("workbench");

  const header = el("header", "workbench-head");
  const title = el("h1", "workbench-title");
  title.textContent = snapshot.task ? snapshot.task.name : "Scratch session";
  const condition = el("span", "condition-chip");
  condition.textContent = snapshot.condition.name;
  const submit = document.createElement("button");
  submit.type = "button";
  submit.className = "task-submit";
  submit.textContent = "Submit task";
  submit.addEventListener("click", () => void controller.submitTask());
  header.append(title, condition, submit);
  root.append(header);

  if (snapshot.task) {
    const details = document.createElement("details");
    details.className = "task-instructions";
    const summary = document.createElement("summary");
    summary.textContent = "Task instructions";
    const body = el("p", "task-instructions-text");
    body.textContent = snapshot.task.instructions;
    details.append(summary, body);
    root.append(details);
  }

  const columns = el("div", "workbench-columns");
  const left = el("div", "column-left");
  const right = el("div", "column-right");
  const editorHost = el("section", "pane");
  const outputHost = el("section", "pane");
  const trayHost = el("section", "pane");
  const chatHost = el("section", "pane");
  left.append(editorHost, outputHost);
  right.append(trayHost, chatHost);
  columns.append(left, right);
  root.append(columns);

  const diffHost = el("section", "overlay");
  const toastHost = el("div", "toast-region");
  root.append(diffHost, toastHost);

  const renders = [
    mountEditorPane(editorHost, store, controller),
    mountOutputPane(outputHost, store),
    mountSuggestionTray(trayHost, store, controller),
    mountChatPanel(chatHost, store, controller),
    mountDiffPanel(diffHost, store, controller),
    mountToastRegion(toastHost, store),
  ];
  const renderAll = () => {
    submit.disabled = store.snapshot.read_only;
    for (const render of renders) render();
  };
  const unsubscribe = store.subscribe(renderAll);
  renderAll();

  if (options.connect !== false) controller.connect();

  return {
    store,
    controller,
    dispose() {
      unsubscribe();
      controller.dispose();
    },
  };
}
