/** Typed client for the session service; the UI's only I/O path. */

import type {
  GenerateResponse,
  SessionWireState,
  WireAnswer,
  WireEdit,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Non-2xx response; `status` drives the inline-vs-retry error handling. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
    readonly body: Record<string, unknown> = {},
  ) {
    super(`${status}: ${detail}`);
  }
}

interface SessionEnvelope {
  session_id: string;
  state: SessionWireState;
}

export class SessionApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    const body = (await response.json().catch(() => ({}))) as Record<string, unknown>;
    if (!response.ok) {
      throw new ApiError(response.status, String(body.detail ?? response.statusText), body);
    }
    return body as T;
  }

  createSession(prompt: string, profile: string, maxTurns?: number): Promise<SessionEnvelope> {
    return this.request<SessionEnvelope>("/sessions", {
      method: "POST",
      body: JSON.stringify({ prompt, profile, max_turns: maxTurns ?? null }),
    });
  }

  getState(sessionId: string): Promise<SessionEnvelope> {
    return this.request<SessionEnvelope>(`/sessions/${sessionId}`);
  }

  postAnswer(sessionId: string, answer: WireAnswer): Promise<SessionEnvelope> {
    return this.request<SessionEnvelope>(`/sessions/${sessionId}/answers`, {
      method: "POST",
      body: JSON.stringify(answer),
    });
  }

  postEdit(sessionId: string, edit: WireEdit): Promise<SessionEnvelope> {
    return this.request<SessionEnvelope>(`/sessions/${sessionId}/edits`, {
      method: "POST",
      body: JSON.stringify(edit),
    });
  }

  generate(sessionId: string): Promise<GenerateResponse> {
    return this.request<GenerateResponse>(`/sessions/${sessionId}/generate`, {
      method: "POST",
    });
  }

  health(): Promise<{ status: string }> {
    return this.request<{ status: string }>("/healthz");
  }
}
