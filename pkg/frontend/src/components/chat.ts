/**
 * Chat column: message history plus the composer. Accepted suggestions
 * appear in the history styled like the user's own messages, with a
 * small badge marking where they came from.
 */

import type { WorkbenchController } from "../controller.js";
import type { SessionStore } from "../store.js";
import type { ChatMessagePayload } from "../types.js";

function renderMessage(message: ChatMessagePayload): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = `msg role-${message.role}`;
  if (message.role === "accepted_suggestion") {
    // Visually a user message; the badge is the only difference.
    wrap.classList.add("role-user");
    const badge = document.createElement("span");
    badge.className = "msg-badge";
    badge.textContent = "accepted suggestion";
    wrap.append(badge);
  }
  const text = document.createElement("div");
  text.className = "msg-text";
  text.textContent = message.content;
  wrap.append(text);
  return wrap;
}

export function mountChatPanel(
  container: HTMLElement,
  store: SessionStore,
  controller: WorkbenchController,
): () => void {
  container.classList.add("chat");

  const history = document.createElement("div");
  history.className = "chat-history";

  const composer = document.createElement("form");
  composer.className = "chat-composer";
  const input = document.createElement("textarea");
  input.className = "chat-input";
  input.placeholder = "Ask the assistant…";
  input.rows = 2;
  const send = document.createElement("button");
  send.type = "submit";
  send.className = "chat-send";
  send.textContent = "Send";
  composer.append(input, send);

  const submit = () => {
    const content = input.value.trim();
    if (!content) return;
    input.value = "";
    void controller.sendChat(content).then((ok) => {
      if (!ok) input.value = content; // rolled back: let the user retry
    });
  };
  composer.addEventListener("submit", (event) => {
    event.preventDefault();
    submit();
  });
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && !event.shiftKey) {
      event.preventDefault();
      submit();
    }
  });

  container.append(history, composer);

  return () => {
    history.replaceChildren(...store.snapshot.chat.map(renderMessage));
    history.scrollTop = history.scrollHeight;
    const readOnly = store.snapshot.read_only;
    input.disabled = readOnly;
    send.disabled = readOnly;
  };
}
