// View-state and its pure transitions. Every number displayed by the page
// is a field copied verbatim from the last service payload; the only
// arithmetic here is the pixel mapping for bar widths.

import type { Assessment, PredictedEmotion, SessionStart, TurnPayload } from "./api.js";

export const SLIDER_KEYS = [
  "relieved",
  "embarrassed",
  "hesitating",
  "stressed",
  "ill_at_ease",
  "focused",
  "aggressive",
  "bored",
] as const;

export type SliderKey = (typeof SLIDER_KEYS)[number];

export const SLIDER_LABELS: Record<SliderKey, string> = {
  relieved: "relieved",
  embarrassed: "embarrassed",
  hesitating: "hesitating",
  stressed: "stressed",
  ill_at_ease: "ill at ease",
  focused: "focused",
  aggressive: "aggressive",
  bored: "bored",
};

export interface TranscriptLine {
  speaker: "recruiter" | "candidate";
  text: string;
}

export interface HistoryRow {
  topicId: string;
  assessment: Assessment;
}

export interface Bars {
  valence: number;
  self_confidence: number;
  motivation: number;
  qualification: number;
}

export interface ViewState {
  sessionId: string | null;
  profileId: string | null;
  currentTopic: string | null;
  transcript: TranscriptLine[];
  bars: Bars;
  predicted: PredictedEmotion[];
  history: HistoryRow[];
  inFlight: boolean;
  done: boolean;
  error: string | null;
}

export function initialView(): ViewState {
  return {
    sessionId: null,
    profileId: null,
    currentTopic: null,
    transcript: [],
    bars: { valence: 0, self_confidence: 0, motivation: 0, qualification: 0 },
    predicted: [],
    history: [],
    inFlight: false,
    done: false,
    error: null,
  };
}

export function startSession(view: ViewState, payload: SessionStart): ViewState {
  return {
    ...initialView(),
    sessionId: payload.session_id,
    profileId: payload.profile_id,
    currentTopic: payload.topic_id,
    transcript: [{ speaker: "recruiter", text: payload.utterance }],
  };
}

/** Null when a submit is not allowed (no session, in flight, or done). */
export function beginSubmit(view: ViewState, answerText: string): ViewState | null {
  if (!view.sessionId || view.inFlight || view.done) {
    return null;
  }
  return {
    ...view,
    inFlight: true,
    error: null,
    transcript: [...view.transcript, { speaker: "candidate", text: answerText }],
  };
}

export function applyTurn(view: ViewState, payload: TurnPayload): ViewState {
  const answeredTopic = view.currentTopic;
  const history = answeredTopic
    ? [...view.history, { topicId: answeredTopic, assessment: payload.assessment }]
    : view.history;
  return {
    ...view,
    inFlight: false,
    done: payload.interview_done,
    currentTopic: payload.topic_id,
    transcript: [...view.transcript, { speaker: "recruiter", text: payload.utterance }],
    bars: {
      valence: payload.recruiter_valence,
      self_confidence: payload.assessment.self_confidence,
      motivation: payload.assessment.motivation,
      qualification: payload.assessment.qualification,
    },
    predicted: payload.predicted_user_emotions,
    history,
  };
}

export function applyError(view: ViewState, message: string): ViewState {
  return { ...view, inFlight: false, error: message };
}

/** Width ratio in [0, 1] for a bar over the [-1, 1] display range. */
export function barRatio(value: number): number {
  const clamped = Math.max(-1, Math.min(1, value));
  return (clamped + 1) / 2;
}

/** Sliders cannot leave [0, 1] no matter what the control reports. */
export function clampSlider(value: number): number {
  if (Number.isNaN(value)) {
    return 0;
  }
  return Math.max(0, Math.min(1, value));
}

/** Per-topic assessment history for the end-of-interview summary. */
export function summaryRows(view: ViewState): HistoryRow[] {
  const seen = new Set<string>();
  const rows: HistoryRow[] = [];
  for (const row of view.history) {
    if (!seen.has(row.topicId)) {
      seen.add(row.topicId);
      rows.push(row);
    }
  }
  return rows;
}
