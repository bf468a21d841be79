/**
 * Clarifications tab: open questions with probability-ordered options
 * plus a free-text field, answered ones shown as committed.
 */

import type { ViewState } from "../state.js";
import { stagedFor } from "../state.js";
import { errorBadge, esc, pct } from "./html.js";

export function renderClarifications(state: ViewState): string {
  const session = state.session;
  if (!session) return `<p class="empty-state">No session yet.</p>`;

  const parts: string[] = [];
  if (session.open_questions.length === 0) {
    const message = session.phase === "finalized"
      ? "Session finalized."
      : "No open clarifications.";
    parts.push(
      `<div class="empty-state">` +
        `<p>${message}</p>` +
        `<button type="button" data-action="generate">Regenerate image</button>` +
        `</div>`,
    );
  }

  for (const question of session.open_questions) {
    const staged = stagedFor(state, question.id);
    const stagedValue =
      staged && staged.kind === "answer" ? staged.answer : undefined;
    const options = question.options
      .map((label, index) => {
        // options render in API order; probabilities verbatim from the wire
        const prob = question.option_probs[index] ?? 0;
        const checked =
          stagedValue?.kind === "option" && stagedValue.value === label
            ? " checked"
            : "";
        return (
          `<label class="option">` +
          `<input type="radio" name="q-${esc(question.id)}" ` +
          `data-question-id="${esc(question.id)}" data-option="${esc(label)}"${checked}>` +
          ` ${esc(label)} <span class="prob">${pct(prob)}</span>` +
          `</label>`
        );
      })
      .join("");
    const freeText = question.free_text_allowed
      ? `<input type="text" class="free-text" placeholder="Or type your own…" ` +
        `data-question-id="${esc(question.id)}" ` +
        `value="${stagedValue?.kind === "free_text" ? esc(stagedValue.value) : ""}">`
      : "";
    parts.push(
      `<section class="question" data-question-id="${esc(question.id)}">` +
        `<p class="question-text">${esc(question.text)}</p>` +
        `<div class="options">${options}</div>` +
        freeText +
        `<button type="button" class="decline" data-decline="${esc(question.id)}">Skip</button>` +
        (staged ? `<span class="staged-marker">staged</span>` : "") +
        errorBadge(state.errors[question.id]) +
        `</section>`,
    );
  }

  if (session.answered.length > 0) {
    const committed = session.answered
      .map(({ question, answer }) => {
        const shown = answer.kind === "decline" ? "(skipped)" : answer.value;
        return (
          `<li class="committed" data-question-id="${esc(question.id)}">` +
          `${esc(question.text)} <strong>${esc(shown)}</strong></li>`
        );
      })
      .join("");
    parts.push(`<h3>Answered</h3><ul class="answered">${committed}</ul>`);
  }

  return parts.join("\n");
}
