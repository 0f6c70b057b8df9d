// Client-side session state: a pure reducer over server messages and user
// intents. All experiment logic stays on the server; this layer only
// mirrors what the participant should see and gates their input so that
// exactly one object choice per babble ever reaches the wire.

import type { ClientMessage, ObjectId, ServerMessage } from "./protocol.js";

export type Screen =
  | "connect" // enter participant id / waiting for the server
  | "instructions" // condition start screen; Start sends ready
  | "trial" // babble shown or outcome playing
  | "break" // between conditions
  | "done";

export interface OutcomeView {
  gestureId: string;
  valence: "positive" | "negative";
  displayHint: string;
}

export interface SessionState {
  participantId: string | null;
  connected: boolean;
  screen: Screen;
  conditionIndex: number; // blinded 1..4; 0 before the first session_start
  epochs: number;
  trial: number;
  babble: string | null;
  awaitingChoice: boolean;
  choiceSent: boolean;
  outcome: OutcomeView | null;
  lastBlock: number | null;
  aborted: boolean;
  notice: string | null;
}

export const KEY_BINDINGS: Readonly<Record<string, ObjectId>> = {
  c: "cookie",
  b: "teddy",
  d: "drink",
};

export function initialState(participantId: string | null = null): SessionState {
  return {
    participantId,
    connected: false,
    screen: "connect",
    conditionIndex: 0,
    epochs: 0,
    trial: 0,
    babble: null,
    awaitingChoice: false,
    choiceSent: false,
    outcome: null,
    lastBlock: null,
    aborted: false,
    notice: null,
  };
}

export function onConnected(state: SessionState): SessionState {
  return { ...state, connected: true, notice: null };
}

export function onDisconnected(state: SessionState): SessionState {
  // Keep the participant id: it is the reconnect token.
  return {
    ...state,
    connected: false,
    awaitingChoice: false,
    notice: "Connection lost - reconnecting...",
  };
}

export function onServerMessage(state: SessionState, msg: ServerMessage): SessionState {
  switch (msg.type) {
    case "session_start": {
      const next: SessionState = {
        ...state,
        conditionIndex: msg.condition_index,
        epochs: msg.epochs,
        trial: 0,
        babble: null,
        outcome: null,
        awaitingChoice: false,
        choiceSent: false,
        lastBlock: null,
        notice: null,
      };
      // The phase hint tells a reconnecting client what to show while it
      // waits; a fresh condition always starts at the instructions screen.
      if (msg.phase === "between_conditions") return { ...next, screen: "break" };
      if (msg.phase === "await_choice" || msg.phase === "showing_outcome") {
        return { ...next, screen: "trial" };
      }
      return { ...next, screen: "instructions" };
    }
    case "babble":
      return {
        ...state,
        screen: "trial",
        trial: msg.trial,
        babble: msg.display_text,
        outcome: null,
        awaitingChoice: true,
        choiceSent: false,
        notice: null,
      };
    case "outcome":
      return {
        ...state,
        screen: "trial",
        awaitingChoice: false,
        outcome: {
          gestureId: msg.gesture_id,
          valence: msg.valence,
          displayHint: msg.display_hint ?? "",
        },
      };
    case "block_boundary": {
      const next = { ...state, lastBlock: msg.block };
      // The final block boundary leads into a break (or the end frame).
      if (msg.block === 3) return { ...next, screen: "break", babble: null, outcome: null };
      return next;
    }
    case "session_end":
      return {
        ...state,
        screen: "done",
        awaitingChoice: false,
        babble: null,
        outcome: null,
        aborted: Boolean(msg.summary?.aborted),
      };
    case "error":
      return { ...state, notice: msg.message };
  }
}

export interface Dispatch {
  state: SessionState;
  send: ClientMessage | null;
}

export function join(state: SessionState, participantId: string): Dispatch {
  const id = participantId.trim();
  if (!id) return { state: { ...state, notice: "Enter a participant id" }, send: null };
  return {
    state: { ...state, participantId: id, notice: null },
    send: { type: "join", participant_id: id },
  };
}

/** Start / Continue buttons and the end of the outcome display interval. */
export function sendReady(state: SessionState): Dispatch {
  return { state, send: { type: "ready" } };
}

/**
 * A click or key press on an object. Gated: only the first choice per
 * babble produces a wire message; repeats are dropped until the next
 * babble re-arms the gate.
 */
export function chooseObject(state: SessionState, object: ObjectId): Dispatch {
  if (!state.awaitingChoice || state.choiceSent) return { state, send: null };
  return {
    state: { ...state, choiceSent: true, awaitingChoice: false },
    send: { type: "object_choice", object_id: object },
  };
}

export function abort(state: SessionState): Dispatch {
  return { state: { ...state, aborted: true }, send: { type: "abort" } };
}
