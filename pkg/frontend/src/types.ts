/**
 * Wire types exchanged with the session service.
 * Mirrors docs/wire-schema.json in the repo root.
 */

/** [label, probability] pairs, already in distribution order. */
export type WireOptions = Array<[string, number]>;

export type EntityStatus = "explicit" | "implicit" | "denied";

export interface WireAttribute {
  name: string;
  options: WireOptions;
}

export interface WireEntity {
  id: string;
  name: string;
  status: EntityStatus;
  presence: number;
  attributes: WireAttribute[];
}

export interface WireRelation {
  id: string;
  subject: string;
  object: string;
  description: string;
  containment: boolean;
  alt: WireOptions;
}

export interface WireGraph {
  prompt: string;
  version: number;
  entities: WireEntity[];
  relations: WireRelation[];
}

export type NodeKind = "entity-presence" | "attribute" | "relation-predicate";

export interface WireNode {
  kind: NodeKind;
  entity?: string;
  attribute?: string;
  relation?: string;
}

export interface WireQuestion {
  id: string;
  node: WireNode;
  text: string;
  options: string[];
  option_probs: number[];
  free_text_allowed: boolean;
  asked_at_version: number;
}

export type AnswerKind = "option" | "free_text" | "decline";

export interface WireAnswer {
  question_id: string;
  kind: AnswerKind;
  value: string;
}

export interface AnsweredItem {
  question: WireQuestion;
  answer: WireAnswer;
}

export interface WireImage {
  uri: string;
  content_type: string;
  prompt_digest: string;
}

export interface WireProfile {
  name: string;
  asks_questions: boolean;
  exposes_graph: boolean;
  accepts_graph_edits: boolean;
  max_turns: number;
}

export type Phase = "initializing" | "awaiting_user" | "finalized";

export interface SessionWireState {
  session_id: string;
  profile: WireProfile;
  phase: Phase;
  turn: number | null;
  version: number;
  prompt_preview: string;
  open_questions: WireQuestion[];
  answered: AnsweredItem[];
  graph?: WireGraph;
  final_prompt?: string;
  image?: WireImage;
  image_error?: string;
}

/** Edit wire form; fields beyond `op` depend on the operation. */
export interface WireEdit {
  op: string;
  entity_id?: string;
  relation_id?: string;
  status?: EntityStatus;
  presence?: number;
  attribute?: string;
  value?: string;
  [key: string]: unknown;
}

export interface GenerateResponse {
  prompt: string;
  state: SessionWireState;
  image?: WireImage;
  images?: WireImage[];
  image_error?: string;
}
