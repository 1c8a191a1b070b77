import { CaptchaApi } from "./api.js";
import { digestAvailable, hashAnswer } from "./hash.js";
import { ClientSession } from "./session.js";

const api = new CaptchaApi("");
const session = new ClientSession({ api, now: () => performance.now() });

const el = {
  question: document.getElementById("question")!,
  input: document.getElementById("answer") as HTMLInputElement,
  submit: document.getElementById("submit") as HTMLButtonElement,
  reload: document.getElementById("reload") as HTMLButtonElement,
  status: document.getElementById("status")!,
  hashPanel: document.getElementById("hash-panel")!,
  targetHash: document.getElementById("target-hash")!,
  inputHash: document.getElementById("input-hash")!,
};

const STATUS_TEXT: Record<string, string> = {
  hash_mismatch: "That answer is not right. Check for typos and try again.",
  paste_detected: "Paste detected. Verification failed; try a new challenge.",
  low_variance: "Typing rhythm looked automated. Try a new challenge.",
  too_fast: "That was too fast. Try a new challenge.",
  too_few_keystrokes: "Please type the answer out. Try a new challenge.",
  already_used: "This challenge was already used. Load a new one.",
  unknown_challenge: "Challenge expired. Load a new one.",
};

function render(): void {
  el.question.textContent = session.question || "…";
  el.input.disabled = session.state !== "answering";
  el.submit.disabled = session.state !== "answering";
  el.targetHash.textContent = session.targetHash;

  switch (session.state) {
    case "loading":
      el.status.className = "status";
      el.status.textContent = session.lastError
        ? "Could not reach the server. Press “New challenge” to retry."
        : "Loading challenge…";
      break;
    case "answering":
      el.status.className = "status";
      el.status.textContent = session.lastResult
        ? STATUS_TEXT[session.lastResult.reason] ?? "Try again."
        : session.lastError
          ? "Network hiccup; your typing is kept. Submit again."
          : "Type your answer.";
      break;
    case "verifying":
      el.status.className = "status";
      el.status.textContent = "Verifying…";
      break;
    case "success":
      el.status.className = "status ok";
      el.status.textContent = "Verified: you typed like a human.";
      break;
    case "failure": {
      const reason = session.lastResult?.reason ?? "";
      el.status.className = "status bad";
      el.status.textContent = STATUS_TEXT[reason] ?? "Verification failed. Try a new challenge.";
      break;
    }
  }
}

// Live hash comparison is progressive enhancement: without a digest
// facility the panel hides and submission still works.
let hashEpoch = 0;
async function updateHashDisplay(): Promise<void> {
  if (!digestAvailable()) {
    el.hashPanel.hidden = true;
    return;
  }
  const epoch = ++hashEpoch;
  const digest = await hashAnswer(el.input.value);
  if (epoch !== hashEpoch) {
    return; // a newer input superseded this computation
  }
  el.inputHash.textContent = digest;
  const match = digest === session.targetHash;
  el.inputHash.className = match ? "hash match" : "hash mismatch";
}

async function loadChallenge(): Promise<void> {
  el.input.value = "";
  render();
  await session.loadChallenge();
  render();
  void updateHashDisplay();
  el.input.focus();
}

async function submit(): Promise<void> {
  render();
  await session.submit(el.input.value);
  if (session.state === "answering" && session.lastResult?.reason === "hash_mismatch") {
    el.input.select();
  }
  render();
}

el.input.addEventListener("keydown", (event) => {
  session.onKeydown();
  if (event.key === "Enter" && !el.submit.disabled) {
    event.preventDefault();
    void submit();
  }
});
// Scoped to the answer input: pasting elsewhere on the page is not ours
// to judge.
el.input.addEventListener("paste", () => session.onPaste());
el.input.addEventListener("input", () => void updateHashDisplay());
el.submit.addEventListener("click", () => void submit());
el.reload.addEventListener("click", () => void loadChallenge());

void loadChallenge();
