/**
 * Relations tab: one row per relation with the description sentence,
 * the current predicate, and a dropdown of alternatives in probability
 * order; picking one stages a set-relation-predicate edit.
 */

import type { ViewState } from "../state.js";
import { stagedFor } from "../state.js";
import { errorBadge, esc, pct } from "./html.js";

export function renderRelations(state: ViewState): string {
  const graph = state.session?.graph;
  if (!graph) {
    return `<p class="empty-state">This profile does not expose the belief graph.</p>`;
  }
  if (graph.relations.length === 0) {
    return `<p class="empty-state">No relations in the graph.</p>`;
  }
  const names = new Map(graph.entities.map((entity) => [entity.id, entity.name]));
  const rows = [...graph.relations]
    .sort((a, b) => a.id.localeCompare(b.id))
    .map((relation) => {
      const key = `rel:${relation.id}`;
      const staged = stagedFor(state, key);
      const stagedValue =
        staged?.kind === "edit" ? String(staged.edit.value) : relation.alt[0][0];
      const options = relation.alt
        .map(([label, prob]) =>
          `<option value="${esc(label)}"${label === stagedValue ? " selected" : ""}>` +
          `${esc(label)} (${pct(prob)})</option>`)
        .join("");
      return (
        `<section class="relation" data-relation-id="${esc(relation.id)}">` +
        `<header>${esc(names.get(relation.subject) ?? relation.subject)} → ` +
        `${esc(names.get(relation.object) ?? relation.object)}</header>` +
        `<p class="description">${esc(relation.description)}</p>` +
        `<p class="current">current: <strong>${esc(relation.alt[0][0])}</strong> ` +
        `<span class="prob">${pct(relation.alt[0][1])}</span></p>` +
        `<label>predicate <select data-edit="relation" ` +
        `data-relation-id="${esc(relation.id)}">${options}</select></label>` +
        (staged ? `<span class="staged-marker">staged</span>` : "") +
        errorBadge(state.errors[key]) +
        `</section>`
      );
    })
    .join("");
  return rows;
}
