import type { CaptchaApi, VerifyResult } from "./api.js";

export type UiState = "loading" | "answering" | "verifying" | "success" | "failure";

export interface SessionDeps {
  api: CaptchaApi;
  // monotonic clock in milliseconds (performance.now in the browser)
  now: () => number;
}

// One challenge attempt as seen from the browser. Holds the capture
// buffer (origin-relative keydown timestamps plus the sticky paste flag)
// and the UI state machine. No DOM here: main.ts wires events in, which
// keeps the whole protocol flow testable in node.
export class ClientSession {
  state: UiState = "loading";
  challengeId = "";
  question = "";
  targetHash = "";
  lastResult: VerifyResult | null = null;
  lastError: string | null = null;

  private timestamps: number[] = [];
  private pasteFlagged = false;
  private origin: number | null = null;

  constructor(private readonly deps: SessionDeps) {}

  // Loading a new challenge fully resets capture state; failure leaves
  // the session in "loading" with the error recorded so the UI can offer
  // a retry.
  async loadChallenge(category?: string): Promise<boolean> {
    this.state = "loading";
    this.resetCapture();
    this.lastResult = null;
    try {
      const challenge = await this.deps.api.fetchChallenge(category);
      this.challengeId = challenge.id;
      this.question = challenge.question;
      this.targetHash = challenge.answer_hash;
      this.lastError = null;
      this.state = "answering";
      return true;
    } catch (err) {
      this.lastError = String(err);
      this.state = "loading";
      return false;
    }
  }

  // Every keydown is recorded, corrections included. The first keydown
  // establishes the origin so absolute page-load time leaks nothing.
  onKeydown(): void {
    if (this.state !== "answering") {
      return;
    }
    const t = this.deps.now();
    if (this.origin === null) {
      this.origin = t;
    }
    this.timestamps.push(t - this.origin);
  }

  // Sticky per challenge: retyping after a paste does not clear it.
  onPaste(): void {
    this.pasteFlagged = true;
  }

  get captureBuffer(): { timestamps: number[]; pasteFlagged: boolean } {
    return { timestamps: [...this.timestamps], pasteFlagged: this.pasteFlagged };
  }

  async submit(typedText: string): Promise<VerifyResult | null> {
    if (this.state !== "answering") {
      return null;
    }
    for (let i = 1; i < this.timestamps.length; i += 1) {
      if (this.timestamps[i]! < this.timestamps[i - 1]!) {
        throw new Error("capture buffer is not monotonic");
      }
    }
    this.state = "verifying";
    let result: VerifyResult;
    try {
      result = await this.deps.api.verify({
        challenge_id: this.challengeId,
        typed_text: typedText,
        trace: {
          timestamps: [...this.timestamps],
          paste_flagged: this.pasteFlagged,
        },
      });
    } catch (err) {
      // network failure: back to answering with the buffer intact so the
      // user can simply resubmit
      this.lastError = String(err);
      this.state = "answering";
      return null;
    }
    this.lastResult = result;
    this.lastError = null;
    if (result.decision === "human") {
      this.state = "success";
    } else if (result.reason === "hash_mismatch" && result.retry_allowed) {
      // inline retry on the same challenge; capture keeps accumulating
      this.state = "answering";
    } else {
      this.state = "failure";
    }
    return result;
  }

  private resetCapture(): void {
    this.timestamps = [];
    this.pasteFlagged = false;
    this.origin = null;
  }
}
