/** Session state machine: one in-flight request, queued keystrokes, and a
 * view whose effort counters come from server payloads only. */

import { ApiClient, ApiError, CreatePayload, SessionView } from "./api.js";

export interface UiSessionView {
  sessionId: string | null;
  hypothesis: string;
  validatedPrefixChars: number;
  keystrokes: number;
  mouseActions: number;
  lastLatencyMs: number;
  accepted: boolean;
  ksmr: number | null;
  error: string | null;
  busy: boolean;
  caret: number | null;
  sourceLabel: string;
}

type Listener = (view: UiSessionView) => void;

interface QueuedFeedback {
  position: number;
  character: string;
}

const EMPTY: UiSessionView = {
  sessionId: null,
  hypothesis: "",
  validatedPrefixChars: 0,
  keystrokes: 0,
  mouseActions: 0,
  lastLatencyMs: 0,
  accepted: false,
  ksmr: null,
  error: null,
  busy: false,
  caret: null,
  sourceLabel: "",
};

export class SessionController {
  private state: UiSessionView = { ...EMPTY };
  private queue: QueuedFeedback[] = [];
  private inFlight = false;
  private listeners: Listener[] = [];
  private lastPayload: CreatePayload | null = null;

  constructor(private readonly api: ApiClient) {}

  get view(): UiSessionView {
    return { ...this.state };
  }

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    const snapshot = this.view;
    for (const listener of this.listeners) listener(snapshot);
  }

  /** Counters and the validated prefix always come from the server. */
  private applyServerView(payload: SessionView): void {
    this.state.sessionId = payload.id;
    this.state.hypothesis = payload.hypothesis;
    this.state.validatedPrefixChars = payload.validated_prefix_chars;
    this.state.keystrokes = payload.keystrokes;
    this.state.mouseActions = payload.mouse_actions;
    this.state.accepted = payload.accepted;
    this.state.lastLatencyMs = payload.latency_ms ?? payload.last_latency_ms;
    this.state.error = null;
  }

  async create(payload: CreatePayload): Promise<void> {
    this.state = { ...EMPTY, busy: true };
    this.emit();
    try {
      const view = await this.api.createSession(payload);
      this.lastPayload = payload;
      this.applyServerView(view);
      this.state.caret = view.validated_prefix_chars;
      this.state.sourceLabel = payload.sample_id
        ? `sample ${payload.sample_id}`
        : payload.text ?? "";
    } catch (error) {
      this.state.error = describe(error);
    } finally {
      this.state.busy = false;
      this.emit();
    }
  }

  /** Recreate a session for the same payload (deterministic server makes the
   * fresh hypothesis identical). */
  async reset(): Promise<void> {
    const payload = this.lastPayload;
    if (!payload) return;
    const old = this.state.sessionId;
    this.queue = [];
    if (old) {
      try {
        await this.api.deleteSession(old);
      } catch {
        // an expired session is already gone; recreating is the point
      }
    }
    await this.create(payload);
  }

  setCaret(position: number): void {
    if (this.state.sessionId === null || this.state.accepted) return;
    this.state.caret = Math.max(0, Math.min(position, this.state.hypothesis.length));
    this.state.error = null;
    this.emit();
  }

  /** One keystroke: dispatch a correction at the caret. While a request is in
   * flight further keystrokes queue up; each maps to exactly one request. */
  typeCharacter(character: string): void {
    if (character.length !== 1) return;
    const caret = this.state.caret;
    if (this.state.sessionId === null || this.state.accepted || caret === null) return;
    this.queue.push({ position: caret, character });
    this.state.caret = caret + 1;
    void this.pump();
  }

  private async pump(): Promise<void> {
    if (this.inFlight) return;
    const next = this.queue.shift();
    if (!next) return;
    const sessionId = this.state.sessionId;
    if (sessionId === null) return;
    this.inFlight = true;
    this.state.busy = true;
    this.emit();
    try {
      const view = await this.api.postFeedback(sessionId, next.position, next.character);
      this.applyServerView(view);
      if (this.queue.length === 0) {
        this.state.caret = view.validated_prefix_chars;
      }
    } catch (error) {
      this.state.error = describe(error);
      if (error instanceof ApiError && error.status === 404) {
        this.state.error = "session expired; create a new one";
      }
      this.queue = [];
      this.state.caret = Math.min(this.state.caret ?? 0, this.state.hypothesis.length);
    } finally {
      this.inFlight = false;
      this.state.busy = this.queue.length > 0;
      this.emit();
      void this.pump();
    }
  }

  async accept(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null) return;
    this.state.busy = true;
    this.emit();
    try {
      const result = await this.api.acceptSession(sessionId);
      // refresh counters from the server so the acceptance action shows up
      const view = await this.api.getSession(sessionId);
      this.applyServerView(view);
      this.state.ksmr = result.ksmr;
    } catch (error) {
      this.state.error = describe(error);
    } finally {
      this.state.busy = false;
      this.emit();
    }
  }

  /** Exposed for tests: pending keystrokes not yet sent. */
  get pendingCount(): number {
    return this.queue.length + (this.inFlight ? 1 : 0);
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return error.message;
  if (error instanceof Error) return error.message;
  return String(error);
}
