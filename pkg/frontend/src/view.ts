// DOM rendering. The view is a pure function of SessionState: every
// transition re-renders, nothing here holds experiment state. Condition
// labels are blinded positions; nothing about the design cell ever
// reaches the page.

import type { ObjectId } from "./protocol.js";
import type { SessionState } from "./session.js";

// Distinct placeholder per gesture: distinctiveness is what matters, not
// robot fidelity. The sad indicator is the antennae-down face.
const GESTURE_ICONS: Record<string, string> = {
  happy_arms: "\u{1F64C}", // raised arms
  happy_head: "\u{1F642}\u{200D}\u{2195}", // head bob
  happy_antennae: "\u{1F4E1}", // antennae wiggle
  sad: "\u{1F622}", // antennae down
};

const OBJECT_LABELS: Array<{ object: ObjectId; label: string; key: string }> = [
  { object: "cookie", label: "Cookie", key: "c" },
  { object: "teddy", label: "Teddy", key: "b" },
  { object: "drink", label: "Drink", key: "d" },
];

export interface ViewHandlers {
  onJoin: (participantId: string) => void;
  onStart: () => void;
  onContinue: () => void;
  onChoose: (object: ObjectId) => void;
  onAbort: () => void;
}

export function buildPage(root: HTMLElement, handlers: ViewHandlers): void {
  root.innerHTML = `
    <header>
      <h1>Robot caregiver session</h1>
      <div id="progress"></div>
      <button id="abort" class="linkish" hidden>Pause &amp; exit</button>
    </header>
    <main>
      <section id="screen-connect">
        <p>Welcome! Enter your participant id to begin (or to resume a
        session you started earlier).</p>
        <input id="participant-id" placeholder="participant id" autocomplete="off" />
        <button id="join">Join</button>
      </section>
      <section id="screen-instructions" hidden>
        <h2 id="session-label"></h2>
        <p>The robot will make a sound when it needs something. Give it the
        object you think it is asking for: click a button or press
        <kbd>c</kbd> for the cookie, <kbd>b</kbd> for the teddy, or
        <kbd>d</kbd> for the drink. The robot starts fresh - earlier
        sound meanings no longer apply.</p>
        <button id="start">Start</button>
      </section>
      <section id="screen-trial" hidden>
        <div id="trial-counter"></div>
        <div id="babble" aria-live="polite"></div>
        <div id="objects">
          ${OBJECT_LABELS.map(
            (o) =>
              `<button class="object" data-object="${o.object}">` +
              `${o.label} <kbd>${o.key}</kbd></button>`
          ).join("")}
        </div>
        <div id="outcome" aria-live="polite" hidden>
          <span id="outcome-icon"></span>
          <span id="outcome-hint"></span>
        </div>
      </section>
      <section id="screen-break" hidden>
        <h2>Session complete</h2>
        <p>Take a break if you like. The robot resets for the next session.</p>
        <button id="continue">Continue</button>
      </section>
      <section id="screen-done" hidden>
        <h2>All sessions complete</h2>
        <p id="done-text">Thank you for taking part!</p>
      </section>
      <p id="notice" role="status"></p>
      <label id="audio-toggle"><input type="checkbox" id="audio" /> play sounds</label>
    </main>
  `;

  (root.querySelector("#join") as HTMLButtonElement).addEventListener("click", () => {
    const input = root.querySelector("#participant-id") as HTMLInputElement;
    handlers.onJoin(input.value);
  });
  (root.querySelector("#start") as HTMLButtonElement).addEventListener(
    "click",
    handlers.onStart
  );
  (root.querySelector("#continue") as HTMLButtonElement).addEventListener(
    "click",
    handlers.onContinue
  );
  (root.querySelector("#abort") as HTMLButtonElement).addEventListener(
    "click",
    handlers.onAbort
  );
  root.querySelectorAll<HTMLButtonElement>("button.object").forEach((button) => {
    button.addEventListener("click", () =>
      handlers.onChoose(button.dataset.object as ObjectId)
    );
  });
}

export function render(root: HTMLElement, state: SessionState): void {
  const show = (id: string, on: boolean) => {
    (root.querySelector(`#${id}`) as HTMLElement).hidden = !on;
  };
  show("screen-connect", state.screen === "connect");
  show("screen-instructions", state.screen === "instructions");
  show("screen-trial", state.screen === "trial");
  show("screen-break", state.screen === "break");
  show("screen-done", state.screen === "done");
  show("abort", state.screen === "trial" || state.screen === "break");

  const progress = root.querySelector("#progress") as HTMLElement;
  progress.textContent =
    state.conditionIndex > 0 && state.screen !== "done"
      ? `Session ${state.conditionIndex} of 4`
      : "";

  if (state.screen === "instructions") {
    (root.querySelector("#session-label") as HTMLElement).textContent =
      `Session ${state.conditionIndex} of 4`;
  }

  if (state.screen === "trial") {
    (root.querySelector("#trial-counter") as HTMLElement).textContent =
      state.trial > 0 ? `Trial ${state.trial} of ${state.epochs}` : "";
    (root.querySelector("#babble") as HTMLElement).textContent = state.babble
      ? `"${state.babble}"`
      : "";
    const enabled = state.awaitingChoice && !state.choiceSent;
    root.querySelectorAll<HTMLButtonElement>("button.object").forEach((button) => {
      button.disabled = !enabled;
    });
    const outcome = root.querySelector("#outcome") as HTMLElement;
    if (state.outcome) {
      outcome.hidden = false;
      outcome.dataset.valence = state.outcome.valence;
      (root.querySelector("#outcome-icon") as HTMLElement).textContent =
        GESTURE_ICONS[state.outcome.gestureId] ?? "\u{2753}";
      (root.querySelector("#outcome-hint") as HTMLElement).textContent =
        state.outcome.displayHint;
    } else {
      outcome.hidden = true;
    }
  }

  if (state.screen === "done") {
    (root.querySelector("#done-text") as HTMLElement).textContent = state.aborted
      ? "Session paused. Rejoin with the same participant id to continue."
      : "Thank you for taking part!";
  }

  (root.querySelector("#notice") as HTMLElement).textContent = state.notice ?? "";
}
