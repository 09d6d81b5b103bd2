// Wire types and HTTP client for the interview session service.
// The client is a pure transport: no interpretation of the numbers here.

export interface SessionStart {
  session_id: string;
  profile_id: string;
  utterance: string;
  topic_id: string;
}

export interface Assessment {
  self_confidence: number;
  motivation: number;
  qualification: number;
}

export interface PredictedEmotion {
  kind: string;
  target: string | null;
  intensity: number;
  about: string;
}

export interface TurnPayload {
  utterance: string;
  topic_id: string | null;
  recruiter_valence: number;
  assessment: Assessment;
  predicted_user_emotions: PredictedEmotion[];
  interview_done: boolean;
}

export interface AffectValues {
  relieved: number;
  embarrassed: number;
  hesitating: number;
  stressed: number;
  ill_at_ease: number;
  focused: number;
  aggressive: number;
  bored: number;
}

export interface SessionApi {
  createSession(profile?: string): Promise<SessionStart>;
  postTurn(sessionId: string, answerText: string, affects: AffectValues): Promise<TurnPayload>;
}

export class ServiceError extends Error {
  constructor(message: string, readonly status?: number, readonly fields?: string[]) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = `${response.status} ${response.statusText}`;
    let fields: string[] | undefined;
    try {
      const body = await response.json();
      if (body && body.detail) {
        detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
        if (typeof body.detail === "object" && Array.isArray(body.detail.fields)) {
          fields = body.detail.fields;
        }
      }
    } catch {
      // keep the HTTP status text
    }
    throw new ServiceError(detail, response.status, fields);
  }
  return (await response.json()) as T;
}

export class HttpSessionApi implements SessionApi {
  constructor(readonly base: string = "") {}

  async createSession(profile?: string): Promise<SessionStart> {
    const response = await fetch(`${this.base}/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(profile ? { profile } : {}),
    });
    return asJson<SessionStart>(response);
  }

  async postTurn(
    sessionId: string,
    answerText: string,
    affects: AffectValues,
  ): Promise<TurnPayload> {
    const response = await fetch(`${this.base}/sessions/${sessionId}/turns`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ answer_text: answerText, affects }),
    });
    return asJson<TurnPayload>(response);
  }

  openTraceStream(sessionId: string): EventSource {
    return new EventSource(`${this.base}/sessions/${sessionId}/events`);
  }
}
