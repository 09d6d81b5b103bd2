// Session controller: api calls in, view-state out. No DOM in here so the
// whole turn lifecycle is testable against a stub service.

import type { AffectValues, SessionApi } from "./api.js";
import { ServiceError } from "./api.js";
import {
  applyError,
  applyTurn,
  beginSubmit,
  initialView,
  startSession,
  type ViewState,
} from "./state.js";

export type Listener = (view: ViewState) => void;

export class SessionController {
  view: ViewState = initialView();
  private listeners: Listener[] = [];

  constructor(private readonly api: SessionApi) {}

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  private update(view: ViewState): void {
    this.view = view;
    for (const listener of this.listeners) {
      listener(view);
    }
  }

  async start(profile?: string): Promise<void> {
    try {
      const payload = await this.api.createSession(profile);
      this.update(startSession(this.view, payload));
    } catch (err) {
      this.update(applyError(this.view, describe(err)));
    }
  }

  /** Resolves to false when the submit was refused (in flight or done). */
  async submit(answerText: string, affects: AffectValues): Promise<boolean> {
    const pending = beginSubmit(this.view, answerText);
    if (pending === null || !this.view.sessionId) {
      return false;
    }
    const sessionId = this.view.sessionId;
    this.update(pending);
    try {
      const payload = await this.api.postTurn(sessionId, answerText, affects);
      this.update(applyTurn(this.view, payload));
      return true;
    } catch (err) {
      this.update(applyError(this.view, describe(err)));
      return false;
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ServiceError && err.fields && err.fields.length) {
    return `${err.message} (fields: ${err.fields.join(", ")})`;
  }
  if (err instanceof Error) {
    return err.message;
  }
  return String(err);
}
