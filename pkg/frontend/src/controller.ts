/**
 * User actions. Every action applies its optimistic state change,
 * posts to the corresponding gateway route, and rolls the change back
 * with a toast if the call fails. Copy reports to the gateway before
 * the clipboard is written; a stale preview offers a re-preview.
 */

import { GatewayError, type SessionClient, type StreamHandle } from "./api.js";
import type { SessionStore } from "./store.js";

const EDIT_DEBOUNCE_MS = 400;

export type ClipboardWrite = (text: string) => Promise<void>;

function defaultClipboard(text: string): Promise<void> {
  if (typeof navigator !== "undefined" && navigator.clipboard) {
    return navigator.clipboard.writeText(text);
  }
  return Promise.resolve();
}

export class WorkbenchController {
  readonly client: SessionClient;
  readonly store: SessionStore;
  private readonly clipboard: ClipboardWrite;
  private stream: StreamHandle | null = null;
  private editTimer: ReturnType<typeof setTimeout> | null = null;
  private pendingEdit: { docId: string; text: string } | null = null;

  constructor(
    client: SessionClient,
    store: SessionStore,
    options: { clipboard?: ClipboardWrite } = {},
  ) {
    this.client = client;
    this.store = store;
    this.clipboard = options.clipboard ?? defaultClipboard;
  }

  private get sessionId(): string {
    return this.store.snapshot.session_id;
  }

  connect(): void {
    this.stream = this.client.openStream(this.sessionId, (frame) =>
      this.store.applyFrame(frame),
    );
  }

  dispose(): void {
    if (this.editTimer !== null) clearTimeout(this.editTimer);
    this.stream?.close();
    this.stream = null;
  }

  private fail(error: unknown): void {
    const message =
      error instanceof GatewayError ? error.message : `request failed: ${String(error)}`;
    this.store.addToast(message, "error");
  }

  /** Optimistic change + API call; restores the snapshot on failure. */
  private async optimistic(
    change: (snapshot: typeof this.store.snapshot) => void,
    call: () => Promise<unknown>,
  ): Promise<boolean> {
    const saved = this.store.cloneSnapshot();
    this.store.mutate(change);
    try {
      await call();
      return true;
    } catch (error) {
      this.store.restoreSnapshot(saved);
      this.fail(error);
      return false;
    }
  }

  // ------------------------------------------------------------- editor

  editDocument(docId: string, text: string): void {
    this.store.mutate((snapshot) => {
      const doc = snapshot.documents.find((d) => d.doc_id === docId);
      if (doc) doc.text = text;
    });
    this.pendingEdit = { docId, text };
    if (this.editTimer !== null) clearTimeout(this.editTimer);
    this.editTimer = setTimeout(() => {
      void this.flushEdit();
    }, EDIT_DEBOUNCE_MS);
  }

  async flushEdit(): Promise<void> {
    if (this.editTimer !== null) {
      clearTimeout(this.editTimer);
      this.editTimer = null;
    }
    const pending = this.pendingEdit;
    if (!pending) return;
    this.pendingEdit = null;
    try {
      await this.client.postEdit(this.sessionId, pending.docId, pending.text);
    } catch (error) {
      this.fail(error);
    }
  }

  async runCode(docId: string): Promise<void> {
    await this.flushEdit();
    try {
      await this.client.runCode(this.sessionId, docId);
    } catch (error) {
      this.fail(error);
    }
  }

  async submitTask(): Promise<void> {
    await this.flushEdit();
    await this.optimistic(
      (snapshot) => {
        snapshot.read_only = true;
      },
      () => this.client.submitTask(this.sessionId),
    );
  }

  // --------------------------------------------------------------- chat

  async sendChat(content: string): Promise<boolean> {
    return this.optimistic(
      (snapshot) => {
        snapshot.chat.push({
          role: "user",
          content,
          code_blocks: [],
          ts_ms: Date.now(),
        });
      },
      () => this.client.postChat(this.sessionId, content),
    );
  }

  // -------------------------------------------------------- suggestions

  async requestSuggestions(): Promise<void> {
    await this.flushEdit();
    try {
      await this.client.requestSuggestions(this.sessionId);
    } catch (error) {
      this.fail(error);
    }
  }

  async expandSuggestion(suggestionId: string): Promise<void> {
    await this.optimistic(
      (snapshot) => {
        const s = snapshot.suggestions.find((x) => x.suggestion_id === suggestionId);
        if (s) s.state = "expanded";
      },
      () => this.client.suggestionOp(this.sessionId, suggestionId, "expand"),
    );
  }

  async collapseSuggestion(suggestionId: string): Promise<void> {
    await this.optimistic(
      (snapshot) => {
        const s = snapshot.suggestions.find((x) => x.suggestion_id === suggestionId);
        if (s) s.state = "collapsed";
      },
      () => this.client.suggestionOp(this.sessionId, suggestionId, "collapse"),
    );
  }

  async acceptSuggestion(suggestionId: string): Promise<void> {
    // The accepted card leaves the tray now; its chat rendering arrives
    // on the push channel.
    await this.optimistic(
      (snapshot) => {
        const s = snapshot.suggestions.find((x) => x.suggestion_id === suggestionId);
        if (s) s.state = "accepted";
      },
      () => this.client.suggestionOp(this.sessionId, suggestionId, "accept"),
    );
  }

  async deleteSuggestion(suggestionId: string): Promise<void> {
    await this.optimistic(
      (snapshot) => {
        const s = snapshot.suggestions.find((x) => x.suggestion_id === suggestionId);
        if (s) s.state = "deleted";
      },
      () => this.client.suggestionOp(this.sessionId, suggestionId, "delete"),
    );
  }

  /** Report the copy to the gateway first, then write the clipboard. */
  async copySuggestion(suggestionId: string): Promise<void> {
    const suggestion = this.store.findSuggestion(suggestionId);
    if (!suggestion || suggestion.code === null) return;
    try {
      await this.client.suggestionOp(this.sessionId, suggestionId, "copy");
    } catch (error) {
      this.fail(error);
      return;
    }
    await this.clipboard(suggestion.code);
    this.store.addToast("Copied to clipboard");
  }

  async clearSuggestions(): Promise<void> {
    await this.optimistic(
      (snapshot) => {
        for (const s of snapshot.suggestions) {
          if (s.state === "collapsed" || s.state === "expanded") s.state = "deleted";
        }
        snapshot.chat = [];
      },
      () => this.client.clearSuggestions(this.sessionId),
    );
  }

  // ------------------------------------------------------------ preview

  async requestPreview(suggestionId: string): Promise<void> {
    await this.flushEdit();
    this.store.pendingPreviewFor = suggestionId;
    this.store.notify();
    try {
      await this.client.requestPreview(this.sessionId, suggestionId);
    } catch (error) {
      this.store.pendingPreviewFor = null;
      this.fail(error);
    }
  }

  async acceptPreview(
    previewId: string,
    options: { selectedHunks?: number[]; finalText?: string } = {},
  ): Promise<void> {
    try {
      await this.client.acceptPreview(this.sessionId, previewId, options);
    } catch (error) {
      if (error instanceof GatewayError && error.code === "stale_preview") {
        const suggestionId = this.store.openPreview?.suggestion_id;
        this.store.openPreview = null;
        this.store.addToast(
          "The document changed since this preview was computed.",
          "error",
          suggestionId
            ? { label: "Re-preview", run: () => void this.requestPreview(suggestionId) }
            : undefined,
        );
        return;
      }
      this.fail(error);
      return;
    }
    this.store.openPreview = null;
    // The merged document text is server-side state; pull it.
    await this.refreshSnapshot();
  }

  async hidePreview(previewId: string): Promise<void> {
    const wasOpen = this.store.openPreview;
    this.store.openPreview = null;
    this.store.notify();
    try {
      await this.client.hidePreview(this.sessionId, previewId);
    } catch (error) {
      this.store.openPreview = wasOpen;
      this.fail(error);
    }
  }

  async refreshSnapshot(): Promise<void> {
    try {
      const snapshot = await this.client.getSnapshot(this.sessionId);
      this.store.resetFromSnapshot(snapshot);
      this.store.notify();
    } catch (error) {
      this.fail(error);
    }
  }
}
