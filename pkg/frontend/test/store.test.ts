/**
 * Frame-ordering and state rules for the session store: strict seq
 * order with buffering, duplicate-batch suppression, reconnect resets,
 * and failure notices surfacing as toasts.
 */

import { describe, expect, it } from "vitest";

import { SessionStore } from "../src/store.js";
import type { PushFrame, SessionSnapshot, SuggestionPayload } from "../src/types.js";
import { MockGateway } from "./mockGateway.js";

function freshSnapshot(): SessionSnapshot {
  const mock = new MockGateway("suggest_preview");
  return JSON.parse(JSON.stringify(mock.snapshot)) as SessionSnapshot;
}

function batchFrame(seq: number, batchId: string, suggestions: SuggestionPayload[]): PushFrame {
  return {
    frame_kind: "suggestions_batch",
    seq,
    payload: { batch_id: batchId, suggestions },
  };
}

function suggestion(id: string, batchId: string): SuggestionPayload {
  return {
    suggestion_id: id,
    category: "complete_code",
    summary: `Completing unfinished code: ${id}`,
    code: null,
    explanation: [],
    origin: "proactive_standard",
    state: "collapsed",
    batch_id: batchId,
  };
}

describe("SessionStore frame ordering", () => {
  it("drops frames at or below the last applied seq", () => {
    const store = new SessionStore(freshSnapshot());
    store.applyFrame(batchFrame(1, "b1", [suggestion("s1", "b1")]));
    expect(store.snapshot.suggestions.length).toBe(1);
    store.applyFrame(batchFrame(1, "b1-again", [suggestion("dup", "b1-again")]));
    store.applyFrame(batchFrame(0, "b0", [suggestion("old", "b0")]));
    expect(store.snapshot.suggestions.length).toBe(1);
  });

  it("buffers frames that arrive ahead until the gap fills", () => {
    const store = new SessionStore(freshSnapshot());
    store.applyFrame(batchFrame(3, "b3", [suggestion("s3", "b3")]));
    expect(store.snapshot.suggestions.length).toBe(0); // waiting on 1 and 2
    store.applyFrame(batchFrame(1, "b1", [suggestion("s1", "b1")]));
    expect(store.snapshot.suggestions.length).toBe(1); // still waiting on 2
    store.applyFrame(batchFrame(2, "b2", [suggestion("s2", "b2")]));
    expect(store.snapshot.suggestions.map((s) => s.suggestion_id)).toEqual(["s1", "s2", "s3"]);
  });

  it("never renders a batch_id twice", () => {
    const store = new SessionStore(freshSnapshot());
    store.applyFrame(batchFrame(1, "b1", [suggestion("s1", "b1")]));
    store.applyFrame(batchFrame(2, "b1", [suggestion("s1-copy", "b1")]));
    expect(store.snapshot.suggestions.map((s) => s.suggestion_id)).toEqual(["s1"]);
  });

  it("seeds shown batches from the snapshot so a replayed batch is not duplicated", () => {
    const snapshot = freshSnapshot();
    snapshot.push_seq = 5;
    snapshot.suggestions.push(suggestion("s1", "b1"));
    const store = new SessionStore(snapshot);
    store.applyFrame(batchFrame(6, "b1", [suggestion("s1", "b1")]));
    expect(store.snapshot.suggestions.length).toBe(1);
  });

  it("resets from the snapshot carried by a connected notice", () => {
    const store = new SessionStore(freshSnapshot());
    store.applyFrame(batchFrame(1, "b1", [suggestion("s1", "b1")]));

    const server = freshSnapshot();
    server.push_seq = 10;
    server.suggestions.push(suggestion("s9", "b9"));
    store.applyFrame({
      frame_kind: "notice",
      seq: 10,
      payload: { notice: "connected", snapshot: server },
    });
    expect(store.snapshot.suggestions.map((s) => s.suggestion_id)).toEqual(["s9"]);

    // Frames from before the reconnect point are stale now.
    store.applyFrame(batchFrame(4, "b4", [suggestion("s4", "b4")]));
    expect(store.snapshot.suggestions.length).toBe(1);
    store.applyFrame(batchFrame(11, "b11", [suggestion("s11", "b11")]));
    expect(store.snapshot.suggestions.length).toBe(2);
  });

  it("closes the open preview when a reset snapshot no longer carries it", () => {
    const store = new SessionStore(freshSnapshot());
    store.applyFrame({
      frame_kind: "preview_ready",
      seq: 1,
      payload: {
        preview_id: "p1",
        suggestion_id: "s1",
        original_text: "a\n",
        proposed_text: "b\n",
        hunks: [],
        provider_latency_ms: 10,
        no_changes: false,
      },
    });
    store.pendingPreviewFor = null;
    store.openPreview = store.snapshot.previews[0]!;

    const server = freshSnapshot();
    server.push_seq = 2;
    store.resetFromSnapshot(server);
    expect(store.openPreview).toBeNull();
  });

  it("opens the preview automatically only when it answers the pending request", () => {
    const store = new SessionStore(freshSnapshot());
    store.pendingPreviewFor = "s2";
    store.applyFrame({
      frame_kind: "preview_ready",
      seq: 1,
      payload: {
        preview_id: "p1",
        suggestion_id: "s1",
        original_text: "",
        proposed_text: "",
        hunks: [],
        provider_latency_ms: 5,
        no_changes: true,
      },
    });
    expect(store.openPreview).toBeNull();
    store.applyFrame({
      frame_kind: "preview_ready",
      seq: 2,
      payload: {
        preview_id: "p2",
        suggestion_id: "s2",
        original_text: "",
        proposed_text: "",
        hunks: [],
        provider_latency_ms: 5,
        no_changes: true,
      },
    });
    expect(store.openPreview?.preview_id).toBe("p2");
    expect(store.pendingPreviewFor).toBeNull();
  });

  it("turns failure notices into error toasts", () => {
    const store = new SessionStore(freshSnapshot());
    store.applyFrame({
      frame_kind: "notice",
      seq: 1,
      payload: { notice: "run_failed", message: "runner offline" },
    });
    store.applyFrame({
      frame_kind: "notice",
      seq: 2,
      payload: { notice: "preview_failed", suggestion_id: "s1", message: "provider offline" },
    });
    expect(store.toasts.map((t) => t.kind)).toEqual(["error", "error"]);
    expect(store.toasts[0]!.text).toContain("runner offline");
    expect(store.toasts[1]!.text).toContain("provider offline");
  });

  it("applies chat and run frames to the snapshot", () => {
    const store = new SessionStore(freshSnapshot());
    store.applyFrame({
      frame_kind: "chat_message",
      seq: 1,
      payload: {
        message: {
          role: "assistant",
          content: "Here is an idea.",
          code_blocks: [],
          ts_ms: 1,
        },
      },
    });
    store.applyFrame({
      frame_kind: "run_output",
      seq: 2,
      payload: {
        doc_id: "d1",
        run: { stdout: "ok\n", stderr: "", exit_status: 0, is_error: false },
      },
    });
    expect(store.snapshot.chat.length).toBe(1);
    expect(store.snapshot.last_run?.stdout).toBe("ok\n");
  });
});
