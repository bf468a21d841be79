/** Canned wire payloads for render/state unit tests. */

import type { SessionWireState, WireGraph, WireQuestion } from "../src/types.js";

export function ballTypeQuestion(): WireQuestion {
  return {
    id: "q0:attribute/ball/type",
    node: { kind: "attribute", entity: "ball", attribute: "type" },
    text: "Is the ball type: 1. a ball of wool, or 2. a tennis ball?",
    options: ["a ball of wool", "a tennis ball"],
    option_probs: [0.55, 0.45],
    free_text_allowed: true,
    asked_at_version: 0,
  };
}

export function mugTableGraph(): WireGraph {
  return {
    prompt: "a mug on a wooden table",
    version: 0,
    entities: [
      {
        id: "mug", name: "mug", status: "explicit", presence: 1.0,
        attributes: [
          { name: "color", options: [["white", 0.6], ["blue", 0.4]] },
        ],
      },
      {
        id: "table", name: "table", status: "explicit", presence: 1.0,
        attributes: [],
      },
      {
        id: "coaster", name: "coaster", status: "implicit", presence: 0.6,
        attributes: [],
      },
    ],
    relations: [
      {
        id: "r1", subject: "mug", object: "table",
        description: "the mug is sitting on the table",
        containment: true,
        alt: [["on", 0.8], ["under", 0.2]],
      },
    ],
  };
}

export function sessionState(overrides: Partial<SessionWireState> = {}): SessionWireState {
  return {
    session_id: "s-test",
    profile: { name: "ag3", asks_questions: true, exposes_graph: true,
               accepts_graph_edits: true, max_turns: 5 },
    phase: "awaiting_user",
    turn: 0,
    version: 0,
    prompt_preview: "a mug on a wooden table",
    open_questions: [ballTypeQuestion()],
    answered: [],
    graph: mugTableGraph(),
    ...overrides,
  };
}
