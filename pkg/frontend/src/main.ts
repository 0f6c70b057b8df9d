// Wiring: socket <-> session reducer <-> view, plus keyboard input and the
// outcome display timer. One event loop, no races: input is disabled
// outside awaiting-choice, and transitions come either from the server or
// from the user, never both at once.

import { playGestureTone, speakBabble } from "./audio.js";
import {
  decodeServerMessage,
  encodeClientMessage,
  type ClientMessage,
  type ObjectId,
} from "./protocol.js";
import {
  KEY_BINDINGS,
  abort,
  chooseObject,
  initialState,
  join,
  onConnected,
  onDisconnected,
  onServerMessage,
  sendReady,
  type Dispatch,
  type SessionState,
} from "./session.js";
import { ReconnectingSocket } from "./socket.js";
import { buildPage, render } from "./view.js";

const OUTCOME_DISPLAY_MS = Number(
  new URLSearchParams(location.search).get("outcomeMs") ?? 1500
);
const PID_STORAGE_KEY = "colearn.participant";

const root = document.getElementById("app") as HTMLElement;
let state: SessionState = initialState(localStorage.getItem(PID_STORAGE_KEY));
let outcomeTimer: number | null = null;

const wsUrl = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/session`;
const socket = new ReconnectingSocket(wsUrl, {
  onOpen: () => {
    state = onConnected(state);
    // Rejoin automatically when we already have the reconnect token.
    if (state.participantId) {
      transmit({ type: "join", participant_id: state.participantId });
    }
    render(root, state);
  },
  onMessage: (raw) => {
    const msg = decodeServerMessage(raw);
    if (!msg) return;
    state = onServerMessage(state, msg);
    if (msg.type === "babble") {
      speakBabble(msg.display_text, audioEnabled());
    }
    if (msg.type === "outcome") {
      playGestureTone(msg.gesture_id, audioEnabled());
      scheduleOutcomeAck();
    }
    render(root, state);
  },
  onClose: () => {
    state = onDisconnected(state);
    render(root, state);
  },
});

function audioEnabled(): boolean {
  return (root.querySelector("#audio") as HTMLInputElement | null)?.checked ?? false;
}

function transmit(msg: ClientMessage): void {
  socket.send(encodeClientMessage(msg));
}

function apply(dispatch: Dispatch): void {
  state = dispatch.state;
  if (dispatch.send) transmit(dispatch.send);
  render(root, state);
}

function scheduleOutcomeAck(): void {
  if (outcomeTimer !== null) clearTimeout(outcomeTimer);
  outcomeTimer = window.setTimeout(() => {
    outcomeTimer = null;
    apply(sendReady(state));
  }, OUTCOME_DISPLAY_MS);
}

buildPage(root, {
  onJoin: (participantId) => {
    const dispatch = join(state, participantId);
    if (dispatch.send) {
      localStorage.setItem(PID_STORAGE_KEY, dispatch.state.participantId ?? "");
    }
    apply(dispatch);
  },
  onStart: () => apply(sendReady(state)),
  onContinue: () => apply(sendReady(state)),
  onChoose: (object: ObjectId) => apply(chooseObject(state, object)),
  onAbort: () => apply(abort(state)),
});

document.addEventListener("keydown", (event) => {
  const object = KEY_BINDINGS[event.key.toLowerCase()];
  if (object && state.screen === "trial") {
    apply(chooseObject(state, object));
  }
});

render(root, state);
socket.connect();
