// Optional sounds: one distinct tone per gesture and synthesized babble
// speech. Off by default; the experiment works silently (babbles are
// always shown as text because the synthesized pairs are easy to confuse).

const GESTURE_TONES: Record<string, number> = {
  happy_arms: 660,
  happy_head: 880,
  happy_antennae: 1100,
  sad: 220,
};

let context: AudioContext | null = null;

export function playGestureTone(gestureId: string, enabled: boolean): void {
  if (!enabled || typeof AudioContext === "undefined") return;
  const frequency = GESTURE_TONES[gestureId];
  if (!frequency) return;
  context = context ?? new AudioContext();
  const oscillator = context.createOscillator();
  const gain = context.createGain();
  oscillator.frequency.value = frequency;
  oscillator.type = gestureId === "sad" ? "sawtooth" : "sine";
  gain.gain.setValueAtTime(0.12, context.currentTime);
  gain.gain.exponentialRampToValueAtTime(0.0001, context.currentTime + 0.4);
  oscillator.connect(gain).connect(context.destination);
  oscillator.start();
  oscillator.stop(context.currentTime + 0.45);
}

export function speakBabble(text: string, enabled: boolean): void {
  if (!enabled || typeof speechSynthesis === "undefined") return;
  const utterance = new SpeechSynthesisUtterance(text);
  utterance.rate = 0.9;
  speechSynthesis.speak(utterance);
}
