// Wire protocol for the session websocket. Field names match the server
// exactly; unknown fields and unknown message types are tolerated so the
// two sides can evolve independently.

export type ObjectId = "teddy" | "cookie" | "drink";

export interface SessionStartMsg {
  type: "session_start";
  condition_index: number; // blinded 1-based position, never the design cell
  epochs: number;
  phase?: string;
}

export interface BabbleMsg {
  type: "babble";
  trial: number;
  babble_id: string;
  display_text: string;
}

export interface OutcomeMsg {
  type: "outcome";
  gesture_id: string;
  valence: "positive" | "negative";
  reward_hidden: boolean;
  display_hint?: string;
}

export interface BlockBoundaryMsg {
  type: "block_boundary";
  block: number;
}

export interface SessionEndMsg {
  type: "session_end";
  summary: { aborted?: boolean; [key: string]: unknown };
}

export interface ErrorMsg {
  type: "error";
  message: string;
}

export type ServerMessage =
  | SessionStartMsg
  | BabbleMsg
  | OutcomeMsg
  | BlockBoundaryMsg
  | SessionEndMsg
  | ErrorMsg;

export type ClientMessage =
  | { type: "join"; participant_id: string }
  | { type: "ready" }
  | { type: "object_choice"; object_id: ObjectId }
  | { type: "abort" };

const SERVER_TYPES = new Set([
  "session_start",
  "babble",
  "outcome",
  "block_boundary",
  "session_end",
  "error",
]);

/** Parse one inbound frame; returns null for junk or unknown types. */
export function decodeServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const msg = data as { type?: unknown };
  if (typeof msg.type !== "string" || !SERVER_TYPES.has(msg.type)) return null;
  return data as ServerMessage;
}

export function encodeClientMessage(msg: ClientMessage): string {
  return JSON.stringify(msg);
}
