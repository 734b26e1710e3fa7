/**
 * Client-side session state: the latest snapshot plus UI-only bits
 * (open preview, toasts), kept current by applying push frames.
 *
 * Frames apply strictly in seq order. A frame at or below the last
 * applied seq is dropped, frames that arrive ahead are buffered until
 * the gap fills, and a "connected" notice resets everything from the
 * snapshot it carries. A suggestions_batch whose batch_id was already
 * shown is never rendered twice (client-side mirror of the server's
 * stale-batch discard).
 */

import type {
  ChatMessagePayload,
  PreviewPayload,
  PushFrame,
  RunPayload,
  SessionSnapshot,
  SuggestionPayload,
} from "./types.js";

export interface Toast {
  id: number;
  text: string;
  kind: "info" | "error";
  /** Optional action rendered as a button, e.g. "Re-preview". */
  actionLabel?: string;
  onAction?: () => void;
}

export type StoreListener = (store: SessionStore) => void;

export class SessionStore {
  snapshot: SessionSnapshot;
  /** Preview currently shown in the diff panel, if any. */
  openPreview: PreviewPayload | null = null;
  /** Suggestion id whose preview request is in flight. */
  pendingPreviewFor: string | null = null;
  toasts: Toast[] = [];

  private lastSeq: number;
  private readonly ahead = new Map<number, PushFrame>();
  private readonly shownBatches = new Set<string>();
  private readonly listeners: StoreListener[] = [];
  private nextToastId = 1;

  constructor(snapshot: SessionSnapshot) {
    this.snapshot = snapshot;
    this.lastSeq = snapshot.push_seq;
    for (const suggestion of snapshot.suggestions) {
      this.shownBatches.add(suggestion.batch_id);
    }
  }

  subscribe(listener: StoreListener): () => void {
    this.listeners.push(listener);
    return () => {
      const index = this.listeners.indexOf(listener);
      if (index >= 0) this.listeners.splice(index, 1);
    };
  }

  notify(): void {
    for (const listener of [...this.listeners]) listener(this);
  }

  // ------------------------------------------------------------ frames

  applyFrame(frame: PushFrame): void {
    if (frame.frame_kind === "notice" && frame.payload.notice === "connected") {
      this.resetFromSnapshot(frame.payload.snapshot as SessionSnapshot);
      this.notify();
      return;
    }
    if (frame.seq <= this.lastSeq) return; // stale or duplicate
    this.ahead.set(frame.seq, frame);
    let applied = false;
    for (;;) {
      const next = this.ahead.get(this.lastSeq + 1);
      if (!next) break;
      this.ahead.delete(next.seq);
      this.lastSeq = next.seq;
      this.applyOrdered(next);
      applied = true;
    }
    if (applied) this.notify();
  }

  resetFromSnapshot(snapshot: SessionSnapshot): void {
    this.snapshot = snapshot;
    this.lastSeq = snapshot.push_seq;
    for (const seq of [...this.ahead.keys()]) {
      if (seq <= this.lastSeq) this.ahead.delete(seq);
    }
    this.shownBatches.clear();
    for (const suggestion of snapshot.suggestions) {
      this.shownBatches.add(suggestion.batch_id);
    }
    if (this.openPreview) {
      const stillLive = snapshot.previews.some(
        (p) => p.preview_id === this.openPreview?.preview_id,
      );
      if (!stillLive) this.openPreview = null;
    }
  }

  private applyOrdered(frame: PushFrame): void {
    switch (frame.frame_kind) {
      case "suggestions_batch": {
        const batchId = frame.payload.batch_id as string;
        if (this.shownBatches.has(batchId)) return; // superseded or duplicate
        this.shownBatches.add(batchId);
        const fresh = frame.payload.suggestions as SuggestionPayload[];
        this.snapshot.suggestions.push(...fresh);
        return;
      }
      case "chat_message": {
        const message = frame.payload.message as ChatMessagePayload;
        this.snapshot.chat.push(message);
        return;
      }
      case "preview_ready": {
        const preview = frame.payload as unknown as PreviewPayload;
        this.snapshot.previews.push(preview);
        if (this.pendingPreviewFor === preview.suggestion_id) {
          this.pendingPreviewFor = null;
          this.openPreview = preview;
        }
        return;
      }
      case "run_output": {
        this.snapshot.last_run = frame.payload.run as RunPayload;
        return;
      }
      case "notice": {
        const notice = frame.payload.notice as string;
        if (notice === "preview_failed") {
          if (this.pendingPreviewFor === frame.payload.suggestion_id) {
            this.pendingPreviewFor = null;
          }
          this.addToast(`Preview failed: ${frame.payload.message as string}`, "error");
        } else if (notice === "run_failed") {
          this.addToast(`Run failed: ${frame.payload.message as string}`, "error");
        }
        return;
      }
    }
  }

  // ----------------------------------------------------- local mutation

  /** Deep copy of the snapshot, for optimistic-update rollback. */
  cloneSnapshot(): SessionSnapshot {
    return JSON.parse(JSON.stringify(this.snapshot)) as SessionSnapshot;
  }

  restoreSnapshot(saved: SessionSnapshot): void {
    this.snapshot = saved;
    this.notify();
  }

  mutate(change: (snapshot: SessionSnapshot) => void): void {
    change(this.snapshot);
    this.notify();
  }

  liveSuggestions(): SuggestionPayload[] {
    return this.snapshot.suggestions.filter(
      (s) => s.state === "collapsed" || s.state === "expanded",
    );
  }

  findSuggestion(suggestionId: string): SuggestionPayload | undefined {
    return this.snapshot.suggestions.find((s) => s.suggestion_id === suggestionId);
  }

  // ------------------------------------------------------------ toasts

  addToast(
    text: string,
    kind: "info" | "error" = "info",
    action?: { label: string; run: () => void },
  ): void {
    const toast: Toast = { id: this.nextToastId++, text, kind };
    if (action) {
      toast.actionLabel = action.label;
      toast.onAction = action.run;
    }
    this.toasts.push(toast);
    this.notify();
  }

  dismissToast(id: number): void {
    this.toasts = this.toasts.filter((t) => t.id !== id);
    this.notify();
  }
}
