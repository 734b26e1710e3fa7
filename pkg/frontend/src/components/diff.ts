/**
 * Integration preview: the proposed change as added/removed line
 * blocks, one include toggle per hunk, and an editable pane holding the
 * proposed result. The rendered lines are exactly the hunk payloads
 * from the wire; nothing is re-diffed client-side.
 */

import type { WorkbenchController } from "../controller.js";
import type { SessionStore } from "../store.js";
import type { DiffHunkPayload } from "../types.js";

interface PanelState {
  excluded: Set<number>;
  editedText: string | null;
}

function diffLine(kind: "removed" | "added", text: string): HTMLElement {
  const line = document.createElement("div");
  line.className = `diff-line ${kind}`;
  const sigil = document.createElement("span");
  sigil.className = "sigil";
  sigil.textContent = kind === "removed" ? "-" : "+";
  const content = document.createElement("span");
  content.className = "line-text";
  content.textContent = text;
  line.append(sigil, content);
  return line;
}

function renderHunk(
  hunk: DiffHunkPayload,
  index: number,
  state: PanelState,
): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "hunk";
  wrap.dataset.hunkIndex = String(index);

  const toggle = document.createElement("label");
  toggle.className = "hunk-toggle";
  const box = document.createElement("input");
  box.type = "checkbox";
  box.checked = !state.excluded.has(index);
  box.addEventListener("change", () => {
    if (box.checked) state.excluded.delete(index);
    else state.excluded.add(index);
  });
  toggle.append(box, document.createTextNode(` include hunk @ line ${hunk.old_start}`));
  wrap.append(toggle);

  const lines = document.createElement("div");
  lines.className = "hunk-lines";
  for (const text of hunk.removed) lines.append(diffLine("removed", text));
  for (const text of hunk.added) lines.append(diffLine("added", text));
  wrap.append(lines);
  return wrap;
}

export function mountDiffPanel(
  container: HTMLElement,
  store: SessionStore,
  controller: WorkbenchController,
): () => void {
  container.classList.add("diff-panel");
  let state: PanelState = { excluded: new Set(), editedText: null };
  let renderedPreviewId: string | null = null;

  return () => {
    const preview = store.openPreview;
    if (!preview) {
      container.hidden = true;
      container.replaceChildren();
      renderedPreviewId = null;
      return;
    }
    if (preview.preview_id !== renderedPreviewId) {
      state = { excluded: new Set(), editedText: null };
      renderedPreviewId = preview.preview_id;
    }
    container.hidden = false;
    container.dataset.previewId = preview.preview_id;
    container.replaceChildren();

    const head = document.createElement("header");
    head.className = "diff-head";
    const title = document.createElement("h2");
    title.textContent = "Integration preview";
    head.append(title);
    container.append(head);

    if (preview.no_changes) {
      const note = document.createElement("p");
      note.className = "diff-empty";
      note.textContent = "The integrated version is identical to the current code.";
      container.append(note);
    }

    const hunks = document.createElement("div");
    hunks.className = "hunks";
    preview.hunks.forEach((hunk, index) => hunks.append(renderHunk(hunk, index, state)));
    container.append(hunks);

    const editLabel = document.createElement("label");
    editLabel.className = "proposed-label";
    editLabel.textContent = "Proposed result (editable)";
    const proposed = document.createElement("textarea");
    proposed.className = "proposed-text";
    proposed.value = state.editedText ?? preview.proposed_text;
    proposed.addEventListener("input", () => {
      state.editedText = proposed.value;
    });
    container.append(editLabel, proposed);

    const actions = document.createElement("footer");
    actions.className = "diff-actions";
    const accept = document.createElement("button");
    accept.type = "button";
    accept.className = "diff-accept";
    accept.textContent = "Accept changes";
    accept.disabled = store.snapshot.read_only;
    accept.addEventListener("click", () => {
      const edited = state.editedText !== null && state.editedText !== preview.proposed_text;
      if (edited) {
        void controller.acceptPreview(preview.preview_id, {
          finalText: state.editedText as string,
        });
      } else if (state.excluded.size === 0) {
        void controller.acceptPreview(preview.preview_id);
      } else {
        const selected = preview.hunks
          .map((_, index) => index)
          .filter((index) => !state.excluded.has(index));
        void controller.acceptPreview(preview.preview_id, { selectedHunks: selected });
      }
    });
    const hide = document.createElement("button");
    hide.type = "button";
    hide.className = "diff-hide";
    hide.textContent = "Hide";
    hide.addEventListener("click", () => void controller.hidePreview(preview.preview_id));
    actions.append(accept, hide);
    container.append(actions);
  };
}
