/**
 * Run console: the latest run's stdout/stderr and its exit badge.
 */

import type { SessionStore } from "../store.js";

export function mountOutputPane(container: HTMLElement, store: SessionStore): () => void {
  container.classList.add("output");
  return () => {
    container.replaceChildren();
    const head = document.createElement("div");
    head.className = "output-head";
    const title = document.createElement("h2");
    title.textContent = "Output";
    head.append(title);

    const run = store.snapshot.last_run;
    if (run) {
      const badge = document.createElement("span");
      badge.className = run.is_error ? "exit-badge error" : "exit-badge ok";
      badge.textContent = `exit ${run.exit_status}`;
      head.append(badge);
    }
    container.append(head);

    if (!run) {
      const empty = document.createElement("p");
      empty.className = "output-empty";
      empty.textContent = "No runs yet.";
      container.append(empty);
      return;
    }
    if (run.stdout) {
      const out = document.createElement("pre");
      out.className = "output-stdout";
      out.textContent = run.stdout;
      container.append(out);
    }
    if (run.stderr) {
      const err = document.createElement("pre");
      err.className = "output-stderr";
      err.textContent = run.stderr;
      container.append(err);
    }
  };
}
