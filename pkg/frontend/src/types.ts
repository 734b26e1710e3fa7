/**
 * Wire types for the gateway API. Field names and shapes mirror the
 * JSON the server sends; nothing here is renamed or massaged.
 */

export interface ConditionPayload {
  name: string;
  proactive_enabled: boolean;
  preview_enabled: boolean;
  idle_threshold_s: number | null;
  cooldown_s: number | null;
  suggestions_per_batch: number;
  guiding_prompts: boolean;
  history_limit: number;
  typing_resume_grace_s: number | null;
}

export interface TaskPayload {
  task_id: string;
  name: string;
  instructions: string;
  task_type: string;
}

export interface DocumentPayload {
  doc_id: string;
  text: string;
  version: number;
}

export type ChatRole = "user" | "assistant" | "accepted_suggestion";

export interface ChatMessagePayload {
  role: ChatRole;
  content: string;
  code_blocks: string[];
  ts_ms: number;
  suggestion_id?: string;
}

export type SuggestionState = "collapsed" | "expanded" | "accepted" | "deleted";

export interface SuggestionPayload {
  suggestion_id: string;
  category: string;
  summary: string;
  code: string | null;
  explanation: string[];
  origin: string;
  state: SuggestionState;
  batch_id: string;
}

export interface DiffHunkPayload {
  old_start: number;
  old_len: number;
  new_start: number;
  new_len: number;
  removed: string[];
  added: string[];
}

export interface PreviewPayload {
  preview_id: string;
  suggestion_id: string;
  original_text: string;
  proposed_text: string;
  hunks: DiffHunkPayload[];
  provider_latency_ms: number;
  no_changes: boolean;
}

export interface RunPayload {
  stdout: string;
  stderr: string;
  exit_status: number;
  is_error: boolean;
}

export interface SessionSnapshot {
  session_id: string;
  condition: ConditionPayload;
  push_seq: number;
  read_only: boolean;
  task: TaskPayload | null;
  documents: DocumentPayload[];
  chat: ChatMessagePayload[];
  suggestions: SuggestionPayload[];
  previews: PreviewPayload[];
  last_run: RunPayload | null;
}

export type FrameKind =
  | "suggestions_batch"
  | "chat_message"
  | "preview_ready"
  | "run_output"
  | "notice";

export interface PushFrame {
  frame_kind: FrameKind;
  seq: number;
  payload: Record<string, unknown>;
}

export interface ErrorEnvelope {
  error: { code: string; message: string };
}
