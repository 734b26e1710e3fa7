/**
 * Toast region: transient notices, errors, and the re-preview prompt.
 */

import type { SessionStore } from "../store.js";

export function mountToastRegion(container: HTMLElement, store: SessionStore): () => void {
  container.classList.add("toasts");
  return () => {
    container.replaceChildren();
    for (const toast of store.toasts) {
      const el = document.createElement("div");
      el.className = `toast ${toast.kind}`;
      const text = document.createElement("span");
      text.className = "toast-text";
      text.textContent = toast.text;
      el.append(text);
      if (toast.actionLabel && toast.onAction) {
        const action = document.createElement("button");
        action.type = "button";
        action.className = "toast-action";
        action.textContent = toast.actionLabel;
        action.addEventListener("click", () => {
          store.dismissToast(toast.id);
          toast.onAction?.();
        });
        el.append(action);
      }
      const dismiss = document.createElement("button");
      dismiss.type = "button";
      dismiss.className = "toast-dismiss";
      dismiss.textContent = "×";
      dismiss.addEventListener("click", () => store.dismissToast(toast.id));
      el.append(dismiss);
      container.append(el);
    }
  };
}
