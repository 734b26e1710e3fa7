/**
 * Typed client for the gateway's HTTP routes and push channel.
 *
 * The fetch implementation and the stream source are injectable so
 * tests can run against an in-memory gateway; the browser entry point
 * passes the real fetch and an EventSource-backed stream.
 */

import type { PushFrame, SessionSnapshot } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface StreamHandle {
  close(): void;
}

export type StreamSource = (
  url: string,
  onFrame: (frame: PushFrame) => void,
) => StreamHandle;

export class GatewayError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.name = "GatewayError";
    this.code = code;
    this.status = status;
  }
}

async function toError(response: Response): Promise<GatewayError> {
  let code = "unknown";
  let message = `request failed with status ${response.status}`;
  try {
    const body = (await response.json()) as { error?: { code?: string; message?: string } };
    if (body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status-based message
  }
  return new GatewayError(code, message, response.status);
}

/** EventSource-backed stream for real browsers. */
export function eventSourceStream(
  url: string,
  onFrame: (frame: PushFrame) => void,
): StreamHandle {
  const source = new EventSource(url);
  source.onmessage = (event: MessageEvent<string>) => {
    onFrame(JSON.parse(event.data) as PushFrame);
  };
  return { close: () => source.close() };
}

export class SessionClient {
  readonly baseUrl: string;
  private readonly fetchFn: FetchLike;
  private readonly streamSource: StreamSource;

  constructor(baseUrl: string, fetchFn?: FetchLike, streamSource?: StreamSource) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
    this.streamSource = streamSource ?? eventSourceStream;
  }

  private async request(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<Response> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      throw await toError(response);
    }
    return response;
  }

  async createSession(
    condition: string,
    task?: string,
    participantId?: string,
  ): Promise<SessionSnapshot> {
    const body: Record<string, string> = { condition };
    if (task) body.task = task;
    if (participantId) body.participant_id = participantId;
    const response = await this.request("POST", "/sessions", body);
    return (await response.json()) as SessionSnapshot;
  }

  async getSnapshot(sessionId: string): Promise<SessionSnapshot> {
    const response = await this.request("GET", `/sessions/${sessionId}`);
    return (await response.json()) as SessionSnapshot;
  }

  async postEdit(sessionId: string, docId: string, text: string): Promise<void> {
    await this.request("POST", `/sessions/${sessionId}/edits`, { doc_id: docId, text });
  }

  async postChat(sessionId: string, content: string): Promise<void> {
    await this.request("POST", `/sessions/${sessionId}/chat`, { content });
  }

  async requestSuggestions(sessionId: string): Promise<void> {
    await this.request("POST", `/sessions/${sessionId}/suggestions/request`);
  }

  async clearSuggestions(sessionId: string): Promise<void> {
    await this.request("POST", `/sessions/${sessionId}/suggestions/clear`);
  }

  async suggestionOp(
    sessionId: string,
    suggestionId: string,
    op: "expand" | "collapse" | "accept" | "delete" | "copy",
  ): Promise<void> {
    await this.request("POST", `/sessions/${sessionId}/suggestions/${suggestionId}/${op}`);
  }

  async requestPreview(sessionId: string, suggestionId: string): Promise<string> {
    const response = await this.request(
      "POST",
      `/sessions/${sessionId}/suggestions/${suggestionId}/preview`,
    );
    const body = (await response.json()) as { preview_id: string };
    return body.preview_id;
  }

  async acceptPreview(
    sessionId: string,
    previewId: string,
    options: { selectedHunks?: number[]; finalText?: string } = {},
  ): Promise<void> {
    const body: Record<string, unknown> = {};
    if (options.selectedHunks !== undefined) body.selected_hunks = options.selectedHunks;
    if (options.finalText !== undefined) body.final_text = options.finalText;
    await this.request("POST", `/sessions/${sessionId}/previews/${previewId}/accept`, body);
  }

  async hidePreview(sessionId: string, previewId: string): Promise<void> {
    await this.request("POST", `/sessions/${sessionId}/previews/${previewId}/hide`);
  }

  async runCode(sessionId: string, docId: string): Promise<void> {
    await this.request("POST", `/sessions/${sessionId}/run`, { doc_id: docId });
  }

  async submitTask(sessionId: string): Promise<void> {
    await this.request("POST", `/sessions/${sessionId}/task/submit`);
  }

  openStream(sessionId: string, onFrame: (frame: PushFrame) => void): StreamHandle {
    return this.streamSource(`${this.baseUrl}/sessions/${sessionId}/stream`, onFrame);
  }
}
