/**
 * Application shell: mounts the renderers, wires DOM events to the
 * pure state transitions, polls the service for refreshes, and keeps
 * one mutation in flight at a time.
 */

import { SessionApi } from "./api.js";
import {
  initialViewState,
  stage,
  submitPending,
  switchTab,
  type Tab,
  type ViewState,
} from "./state.js";
import { renderClarifications } from "./render/clarifications.js";
import { renderEntityGraph } from "./render/entityGraph.js";
import { renderRelations } from "./render/relations.js";
import { esc } from "./render/html.js";

const TABS: Array<{ id: Tab; label: string }> = [
  { id: "clarifications", label: "Clarifications" },
  { id: "graph-attributes", label: "Graph: Entities & Attributes" },
  { id: "graph-relations", label: "Graph: Relations" },
];

export function renderApp(state: ViewState): string {
  const session = state.session;
  const tabs = TABS.map(({ id, label }) =>
    `<button type="button" class="tab${state.tab === id ? " active" : ""}" ` +
    `data-tab="${id}">${label}</button>`).join("");
  const body =
    state.tab === "clarifications" ? renderClarifications(state)
    : state.tab === "graph-attributes" ? renderEntityGraph(state)
    : renderRelations(state);
  const pendingBar = state.pending.length > 0
    ? `<div class="pending-bar">${state.pending.length} staged ` +
      `<button type="button" data-action="submit"${state.busy ? " disabled" : ""}>` +
      `Submit</button></div>`
    : "";
  const globalError = state.errors[""]
    ? `<div class="global-error" role="alert">${esc(state.errors[""])} ` +
      `<button type="button" data-action="submit">Retry</button></div>`
    : "";
  const output = state.output
    ? `<div class="output">` +
      `<p class="final-prompt">${esc(state.output.prompt)}</p>` +
      state.output.images.map((image) =>
        `<figure class="image"><code>${esc(image.uri)}</code></figure>`).join("") +
      (state.output.imageError
        ? `<p class="inline-error">${esc(state.output.imageError)}</p>` : "") +
      `</div>`
    : "";
  return (
    `<header class="session-header">` +
    `<input type="text" id="prompt-input" placeholder="Describe the image…" ` +
    `value="${esc(session?.prompt_preview ?? "")}" ${session ? "readonly" : ""}>` +
    (session
      ? `<span class="phase">${session.phase}</span>`
      : `<select id="profile-select">` +
        `<option value="ag3">ag3</option><option value="ag2">ag2</option>` +
        `<option value="ag1">ag1</option><option value="t2i">t2i</option></select>` +
        `<button type="button" data-action="create">Start</button>`) +
    `</header>` +
    globalError +
    `<nav class="tabs">${tabs}</nav>` +
    `<main>${body}</main>` +
    pendingBar +
    output
  );
}

export class App {
  state: ViewState = initialViewState();
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: SessionApi,
    private readonly pollIntervalMs = 4000,
  ) {
    this.root.addEventListener("click", (event) => this.onClick(event));
    this.root.addEventListener("change", (event) => this.onChange(event));
    this.render();
  }

  render(): void {
    this.root.innerHTML = renderApp(this.state);
  }

  private set(state: ViewState): void {
    this.state = state;
    this.render();
  }

  private startPolling(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => void this.poll(), this.pollIntervalMs);
  }

  private async poll(): Promise<void> {
    const session = this.state.session;
    if (!session || this.state.busy) return;
    try {
      const envelope = await this.api.getState(session.session_id);
      this.set({ ...this.state, session: envelope.state });
    } catch {
      // transient poll failures are invisible; mutations surface errors
    }
  }

  private onClick(event: Event): void {
    const target = event.target as HTMLElement;
    const action = target.dataset.action;
    if (action === "create") void this.create();
    else if (action === "submit") void this.submit();
    else if (action === "generate") void this.generate();
    else if (target.dataset.tab) {
      this.set(switchTab(this.state, target.dataset.tab as Tab));
    } else if (target.dataset.decline) {
      const questionId = target.dataset.decline;
      this.set(stage(this.state, {
        kind: "answer", key: questionId,
        answer: { question_id: questionId, kind: "decline", value: "" },
      }));
    }
  }

  private onChange(event: Event): void {
    const target = event.target as HTMLInputElement | HTMLSelectElement;
    const data = target.dataset;
    if (data.questionId && target instanceof HTMLInputElement) {
      if (target.type === "radio" && data.option !== undefined) {
        this.set(stage(this.state, {
          kind: "answer", key: data.questionId,
          answer: { question_id: data.questionId, kind: "option", value: data.option },
        }));
      } else if (target.type === "text" && target.value.trim()) {
        this.set(stage(this.state, {
          kind: "answer", key: data.questionId,
          answer: { question_id: data.questionId, kind: "free_text",
                    value: target.value.trim() },
        }));
      }
    } else if (data.edit === "status" && data.entityId) {
      this.set(stage(this.state, {
        kind: "edit", key: `status:${data.entityId}`,
        edit: { op: "set-status", entity_id: data.entityId,
                status: target.value as "explicit" | "implicit" | "denied" },
      }));
    } else if (data.edit === "attr" && data.entityId && data.attribute) {
      this.set(stage(this.state, {
        kind: "edit", key: `attr:${data.entityId}:${data.attribute}`,
        edit: { op: "set-attribute-value", entity_id: data.entityId,
                attribute: data.attribute, value: target.value },
      }));
    } else if (data.edit === "relation" && data.relationId) {
      this.set(stage(this.state, {
        kind: "edit", key: `rel:${data.relationId}`,
        edit: { op: "set-relation-predicate", relation_id: data.relationId,
                value: target.value },
      }));
    }
  }

  private async create(): Promise<void> {
    const promptInput = this.root.querySelector<HTMLInputElement>("#prompt-input");
    const profileSelect = this.root.querySelector<HTMLSelectElement>("#profile-select");
    const prompt = promptInput?.value.trim() ?? "";
    if (!prompt) return;
    this.set({ ...this.state, busy: true });
    try {
      const envelope = await this.api.createSession(prompt, profileSelect?.value ?? "ag3");
      this.set({ ...initialViewState(), session: envelope.state });
      this.startPolling();
    } catch (error) {
      this.set({ ...this.state, busy: false,
                 errors: { "": error instanceof Error ? error.message : "failed" } });
    }
  }

  private async submit(): Promise<void> {
    if (this.state.busy) return;
    this.set({ ...this.state, busy: true });
    const next = await submitPending(this.api, this.state);
    this.set({ ...next, busy: false });
  }

  private async generate(): Promise<void> {
    const session = this.state.session;
    if (!session || this.state.busy) return;
    this.set({ ...this.state, busy: true });
    try {
      const result = await this.api.generate(session.session_id);
      this.set({
        ...this.state, busy: false, session: result.state,
        output: { prompt: result.prompt,
                  images: result.images ?? (result.image ? [result.image] : []),
                  imageError: result.image_error },
      });
    } catch (error) {
      this.set({ ...this.state, busy: false,
                 errors: { ...this.state.errors,
                           "": error instanceof Error ? error.message : "failed" } });
    }
  }
}
