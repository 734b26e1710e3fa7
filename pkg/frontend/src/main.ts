/**
 * Browser entry point. Query parameters select the gateway and the
 * session:
 *
 *   ?gateway=http://localhost:8000   gateway base URL (default: same origin)
 *   &session=<id>                    join an existing session, or
 *   &condition=suggest_preview       create one (with optional
 *   &task=storefront&participant=p1  task and participant)
 */

import { SessionClient } from "./api.js";
import { mountWorkbench } from "./app.js";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const params = new URLSearchParams(window.location.search);
  const base = params.get("gateway") ?? "";
  const client = new SessionClient(base);

  const existing = params.get("session");
  const snapshot = existing
    ? await client.getSnapshot(existing)
    : await client.createSession(
        params.get("condition") ?? "suggest_preview",
        params.get("task") ?? undefined,
        params.get("participant") ?? undefined,
      );
  mountWorkbench(root, client, snapshot);
}

boot().catch((error: unknown) => {
  const root = document.getElementById("app") ?? document.body;
  const notice = document.createElement("p");
  notice.className = "boot-error";
  notice.textContent = `Could not start: ${String(error)}`;
  root.append(notice);
});
