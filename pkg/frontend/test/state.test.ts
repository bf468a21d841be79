import { describe, expect, it } from "vitest";

import { ApiError, SessionApi } from "../src/api.js";
import {
  initialViewState,
  stage,
  stagedFor,
  submitPending,
  switchTab,
  type ViewState,
} from "../src/state.js";
import { sessionState } from "./fixtures.js";

function staged(): ViewState {
  let state: ViewState = { ...initialViewState(), session: sessionState() };
  state = stage(state, {
    kind: "answer", key: "q0:attribute/ball/type",
    answer: { question_id: "q0:attribute/ball/type", kind: "option",
              value: "a ball of wool" },
  });
  state = stage(state, {
    kind: "edit", key: "rel:r1",
    edit: { op: "set-relation-predicate", relation_id: "r1", value: "under" },
  });
  return state;
}

function fakeApi(handler: (path: string, init?: RequestInit) => Response): SessionApi {
  return new SessionApi("", async (path, init) => handler(path, init));
}

function okEnvelope(): Response {
  return new Response(JSON.stringify({ session_id: "s-test", state: sessionState() }),
                      { status: 200 });
}

describe("staging", () => {
  it("keeps one item per control key, latest wins", () => {
    let state = staged();
    state = stage(state, {
      kind: "answer", key: "q0:attribute/ball/type",
      answer: { question_id: "q0:attribute/ball/type", kind: "free_text",
                value: "rubber ball" },
    });
    expect(state.pending).toHaveLength(2);
    const item = stagedFor(state, "q0:attribute/ball/type");
    expect(item?.kind).toBe("answer");
    expect(item && item.kind === "answer" ? item.answer.value : "").toBe("rubber ball");
  });

  it("tab switches never lose pending input", () => {
    let state = staged();
    state = switchTab(state, "graph-relations");
    state = switchTab(state, "clarifications");
    expect(state.pending).toHaveLength(2);
    expect(state.tab).toBe("clarifications");
  });
});

describe("submitPending", () => {
  it("posts items in order and empties pending on success", async () => {
    const calls: string[] = [];
    const api = fakeApi((path) => {
      calls.push(path);
      return okEnvelope();
    });
    const result = await submitPending(api, staged());
    expect(calls).toEqual(["/sessions/s-test/answers", "/sessions/s-test/edits"]);
    expect(result.pending).toEqual([]);
    expect(result.errors).toEqual({});
  });

  it("pins a 4xx to the offending control and preserves the rest", async () => {
    const calls: string[] = [];
    const api = fakeApi((path) => {
      calls.push(path);
      return new Response(JSON.stringify({ detail: "stale question" }),
                          { status: 409 });
    });
    const result = await submitPending(api, staged());
    expect(calls).toHaveLength(1); // stopped at the first failure
    expect(result.pending).toHaveLength(2); // offending + untouched
    expect(result.errors["q0:attribute/ball/type"]).toBe("stale question");
  });

  it("keeps everything and sets the global error on network failure", async () => {
    const api = new SessionApi("", async () => {
      throw new TypeError("fetch failed");
    });
    const result = await submitPending(api, staged());
    expect(result.pending).toHaveLength(2);
    expect(result.errors[""]).toContain("network");
  });

  it("404 surfaces as ApiError with status", async () => {
    const api = fakeApi(() =>
      new Response(JSON.stringify({ detail: "unknown session" }), { status: 404 }));
    await expect(api.getState("nope")).rejects.toMatchObject(
      { status: 404, detail: "unknown session" } satisfies Partial<ApiError>);
  });
});
