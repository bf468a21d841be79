/**
 * View state and the staged-input queue.
 *
 * Everything here is pure data plus pure transitions: the renderers are
 * functions of (session wire state, pending), so the same inputs always
 * produce the same markup, and switching tabs can never lose staged
 * input because staging lives outside the tabs.
 */

import { ApiError, SessionApi } from "./api.js";
import type { SessionWireState, WireAnswer, WireEdit, WireImage } from "./types.js";

export type Tab = "clarifications" | "graph-attributes" | "graph-relations";

export interface PendingAnswer {
  kind: "answer";
  /** One staged answer per question; the question id is the control key. */
  key: string;
  answer: WireAnswer;
}

export interface PendingEdit {
  kind: "edit";
  /** Control key, e.g. "status:mug" or "attr:mug:color" or "rel:r1". */
  key: string;
  edit: WireEdit;
}

export type PendingItem = PendingAnswer | PendingEdit;

export interface Output {
  prompt: string;
  images: WireImage[];
  imageError?: string;
}

export interface ViewState {
  tab: Tab;
  session: SessionWireState | null;
  pending: PendingItem[];
  /** Inline errors keyed like pending items; "" key = global/network. */
  errors: Record<string, string>;
  output: Output | null;
  busy: boolean;
}

export function initialViewState(): ViewState {
  return { tab: "clarifications", session: null, pending: [], errors: {},
           output: null, busy: false };
}

export function switchTab(state: ViewState, tab: Tab): ViewState {
  return { ...state, tab }; // pending untouched by design
}

/** Stage or restage one item; one staged item per control key. */
export function stage(state: ViewState, item: PendingItem): ViewState {
  const pending = state.pending.filter((existing) => existing.key !== item.key);
  pending.push(item);
  const errors = { ...state.errors };
  delete errors[item.key];
  return { ...state, pending, errors };
}

export function unstage(state: ViewState, key: string): ViewState {
  return { ...state, pending: state.pending.filter((item) => item.key !== key) };
}

export function stagedFor(state: ViewState, key: string): PendingItem | undefined {
  return state.pending.find((item) => item.key === key);
}

export function applyServerState(state: ViewState, session: SessionWireState): ViewState {
  return { ...state, session };
}

/**
 * Post staged items in order.
 *
 * Success removes the item and adopts the returned session state. A 4xx
 * stops the queue, pins the error to the offending control and keeps it
 * plus everything behind it staged. A network failure keeps the whole
 * queue and sets the global error so the UI can offer a retry.
 */
export async function submitPending(
  api: SessionApi,
  state: ViewState,
): Promise<ViewState> {
  if (!state.session) return state;
  const sessionId = state.session.session_id;
  let current: ViewState = { ...state, errors: { ...state.errors }, busy: false };
  delete current.errors[""];
  const queue = [...current.pending];
  while (queue.length > 0) {
    const item = queue[0];
    try {
      const envelope =
        item.kind === "answer"
          ? await api.postAnswer(sessionId, item.answer)
          : await api.postEdit(sessionId, item.edit);
      queue.shift();
      current = {
        ...current,
        session: envelope.state,
        pending: current.pending.filter((p) => p.key !== item.key),
      };
    } catch (error) {
      if (error instanceof ApiError) {
        current = {
          ...current,
          errors: { ...current.errors, [item.key]: error.detail },
        };
      } else {
        current = {
          ...current,
          errors: { ...current.errors, "": "network error; staged input kept" },
        };
      }
      return current;
    }
  }
  return current;
}
