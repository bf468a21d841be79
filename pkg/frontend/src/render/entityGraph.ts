/**
 * Entities & attributes tab.
 *
 * The canvas nests containment-related entities: a containment relation
 * places the subject box inside the object's boundary (a mug "on" a
 * table sits within the table). Implicit entities get dashed borders,
 * explicit solid, denied dimmed. A containment cycle falls back to a
 * flat layout with a warning badge. Below the canvas, one card per
 * entity offers a status toggle and per-attribute dropdowns in
 * probability order, staging graph edits.
 */

import type { ViewState } from "../state.js";
import { stagedFor } from "../state.js";
import type { WireEntity, WireGraph } from "../types.js";
import { errorBadge, esc, pct } from "./html.js";

export interface ContainmentLayout {
  /** entity id -> parent entity id (containment object) */
  parents: Map<string, string>;
  cyclic: boolean;
}

export function containmentLayout(graph: WireGraph): ContainmentLayout {
  const known = new Set(graph.entities.map((entity) => entity.id));
  const parents = new Map<string, string>();
  const relations = [...graph.relations].sort((a, b) => a.id.localeCompare(b.id));
  for (const relation of relations) {
    if (!relation.containment) continue;
    if (!known.has(relation.subject) || !known.has(relation.object)) continue;
    if (!parents.has(relation.subject) && relation.subject !== relation.object) {
      parents.set(relation.subject, relation.object);
    }
  }
  // cycle check: follow parent chains; revisiting within one walk = cycle
  for (const start of parents.keys()) {
    const seen = new Set<string>([start]);
    let current = parents.get(start);
    while (current !== undefined) {
      if (seen.has(current)) return { parents, cyclic: true };
      seen.add(current);
      current = parents.get(current);
    }
  }
  return { parents, cyclic: false };
}

function entityBox(entity: WireEntity, childrenHtml: string): string {
  return (
    `<div class="entity-box ${entity.status}" data-entity-id="${esc(entity.id)}">` +
    `<span class="entity-name">${esc(entity.name)}</span>` +
    `<span class="presence">${pct(entity.presence)}</span>` +
    childrenHtml +
    `</div>`
  );
}

function renderBoxes(graph: WireGraph, layout: ContainmentLayout): string {
  const byId = new Map(graph.entities.map((entity) => [entity.id, entity]));
  const childIds = new Map<string, string[]>();
  for (const [child, parent] of layout.parents) {
    const siblings = childIds.get(parent) ?? [];
    siblings.push(child);
    childIds.set(parent, siblings);
  }
  const renderTree = (entityId: string): string => {
    const entity = byId.get(entityId);
    if (!entity) return "";
    const children = (childIds.get(entityId) ?? [])
      .sort()
      .map(renderTree)
      .join("");
    return entityBox(entity, children ? `<div class="nested">${children}</div>` : "");
  };
  const sorted = [...graph.entities].sort((a, b) => a.id.localeCompare(b.id));
  if (layout.cyclic) {
    const flat = sorted.map((entity) => entityBox(entity, "")).join("");
    return (
      `<div class="warning-badge" role="alert">containment cycle; flat layout</div>` +
      `<div class="canvas flat">${flat}</div>`
    );
  }
  const roots = sorted.filter((entity) => !layout.parents.has(entity.id));
  return `<div class="canvas">${roots.map((e) => renderTree(e.id)).join("")}</div>`;
}

function entityCard(state: ViewState, entity: WireEntity): string {
  const statusKey = `status:${entity.id}`;
  const stagedStatus = stagedFor(state, statusKey);
  const stagedStatusValue =
    stagedStatus?.kind === "edit" ? String(stagedStatus.edit.status) : entity.status;
  const statusOptions = (["explicit", "implicit", "denied"] as const)
    .map((status) =>
      `<option value="${status}"${status === stagedStatusValue ? " selected" : ""}>` +
      `${status}</option>`)
    .join("");
  const attrRows = entity.attributes
    .map((attribute) => {
      const key = `attr:${entity.id}:${attribute.name}`;
      const staged = stagedFor(state, key);
      const stagedValue =
        staged?.kind === "edit" ? String(staged.edit.value) : attribute.options[0][0];
      const options = attribute.options
        .map(([label, prob]) =>
          `<option value="${esc(label)}"${label === stagedValue ? " selected" : ""}>` +
          `${esc(label)} (${pct(prob)})</option>`)
        .join("");
      return (
        `<label class="attr-row">${esc(attribute.name)} ` +
        `<select data-edit="attr" data-entity-id="${esc(entity.id)}" ` +
        `data-attribute="${esc(attribute.name)}">${options}</select>` +
        (staged ? `<span class="staged-marker">staged</span>` : "") +
        errorBadge(state.errors[key]) +
        `</label>`
      );
    })
    .join("");
  return (
    `<article class="entity-card" data-entity-id="${esc(entity.id)}">` +
    `<header>${esc(entity.name)} <em class="status-label">${entity.status}</em></header>` +
    `<label>status <select data-edit="status" data-entity-id="${esc(entity.id)}">` +
    `${statusOptions}</select></label>` +
    (stagedStatus ? `<span class="staged-marker">staged</span>` : "") +
    errorBadge(state.errors[statusKey]) +
    attrRows +
    `</article>`
  );
}

export function renderEntityGraph(state: ViewState): string {
  const graph = state.session?.graph;
  if (!graph) {
    return `<p class="empty-state">This profile does not expose the belief graph.</p>`;
  }
  if (graph.entities.length === 0) {
    return `<p class="empty-state">No entities yet.</p>`;
  }
  const layout = containmentLayout(graph);
  const cards = [...graph.entities]
    .sort((a, b) => a.id.localeCompare(b.id))
    .map((entity) => entityCard(state, entity))
    .join("");
  return renderBoxes(graph, layout) + `<div class="cards">${cards}</div>`;
}
