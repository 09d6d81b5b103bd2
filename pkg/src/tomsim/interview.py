"""Job-interview layer: affect interpretation, question selection per
recruiter profile, and the running candidate assessment.

The candidate's free-text answer is opaque to the engine; only the eight
affect channels carry signal, as the scenario's interpretation rules
declare. Question selection for the comprehensive (A) and challenging (C)
profiles goes through affective-impact prediction for every candidate
question; the neutral profile (B) just follows the declared topic order.
"""
from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields
from typing import Optional

from .emotions import AppraisalTheory, valence_of
from .engine import Engine, EngineError, FiringRecord
from .inference import render_bindings
from .logic import Atom, Event, SpeechAct, deg_eq, deg_gt, deg_lt
from .parsing import serialize_event
from .scenario import (
    AFFECT_CHANNELS,
    ProfileDecl,
    Question,
    ScenarioDoc,
    TopicDecl,
    TTRule,
)
from .state import EmotionInstance

FAREWELL = "Thank you, that concludes our interview."


class AffectVectorError(ValueError):
    def __init__(self, message: str, fields: list[str]):
        super().__init__(message)
        self.fields = fields


@dataclass(frozen=True)
class AffectVector:
    relieved: float = 0.0
    embarrassed: float = 0.0
    hesitating: float = 0.0
    stressed: float = 0.0
    ill_at_ease: float = 0.0
    focused: float = 0.0
    aggressive: float = 0.0
    bored: float = 0.0

    def __post_init__(self):
        bad = [f.name for f in dc_fields(self) if not _in_unit(getattr(self, f.name))]
        if bad:
            raise AffectVectorError(f"affect channels outside [0, 1]: {bad}", bad)

    @classmethod
    def from_dict(cls, data: dict) -> "AffectVector":
        missing = [c for c in AFFECT_CHANNELS if c not in data]
        extra = [k for k in data if k not in AFFECT_CHANNELS]
        if missing or extra:
            raise AffectVectorError(
                f"affect vector must have exactly the channels {list(AFFECT_CHANNELS)}; "
                f"missing {missing}, unexpected {extra}",
                missing + extra,
            )
        return cls(**{c: data[c] for c in AFFECT_CHANNELS})

    def value(self, channel: str) -> float:
        return getattr(self, channel)


def _in_unit(v) -> bool:
    return isinstance(v, (int, float)) and 0.0 <= v <= 1.0


@dataclass(frozen=True)
class Assessment:
    self_confidence: float = 0.0
    motivation: float = 0.0
    qualification: float = 0.0

    def apply(self, deltas: dict[str, float]) -> "Assessment":
        values = {}
        for f in dc_fields(self):
            v = getattr(self, f.name) + deltas.get(f.name, 0.0)
            values[f.name] = max(-1.0, min(1.0, v))
        return Assessment(**values)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in dc_fields(self)}


def interpret_affects(topic: TopicDecl, affects: AffectVector):
    """Apply a topic's interpretation rules to one affect reading.

    Returns (outside_facts, deltas): belief updates to feed the engine and
    assessment deltas. Belief strength grows with the channel value through
    the average combination of the reading against itself.
    """
    from .logic import avg_unit

    facts = []
    deltas: dict[str, float] = {}
    for rule in topic.tt_rules:
        v = affects.value(rule.channel)
        if not _tt_fires(rule, v):
            continue
        for fld, coef in rule.deltas.items():
            deltas[fld] = deltas.get(fld, 0.0) + coef * v
        if rule.believe is not None:
            facts.append(
                (f"tt:{topic.id}:{rule.channel}", rule.believe, avg_unit(v, v))
            )
    return facts, deltas


def _tt_fires(rule: TTRule, v: float) -> bool:
    if rule.op == ">":
        return deg_gt(v, rule.threshold)
    if rule.op == "<":
        return deg_lt(v, rule.threshold)
    if rule.op == ">=":
        return not deg_lt(v, rule.threshold)
    if rule.op == "<=":
        return not deg_gt(v, rule.threshold)
    return deg_eq(v, rule.threshold)


class InterviewComplete(RuntimeError):
    pass


@dataclass
class TurnResult:
    utterance: str
    topic_id: Optional[str]
    recruiter_valence: float
    assessment: Assessment
    predicted: list[EmotionInstance]
    interview_done: bool


@dataclass
class TranscriptEntry:
    speaker: str
    text: str
    topic_id: Optional[str]
    assessment: Assessment


class InterviewSession:
    """One live interview: a recruiter engine plus interview bookkeeping."""

    def __init__(
        self,
        doc: ScenarioDoc,
        profile_id: str = "B",
        theory: Optional[AppraisalTheory] = None,
    ):
        if not doc.topics:
            raise EngineError("interview scenarios declare at least one topic")
        self.doc = doc
        self.profile: ProfileDecl = doc.profile(profile_id) or ProfileDecl(profile_id, None)
        self.engine = Engine(doc, theory=theory)
        if self.engine.partner is None:
            raise EngineError("interview scenarios declare recruiter and candidate")
        self.candidate = self.engine.partner
        self.remaining: list[TopicDecl] = list(doc.topics)
        self.assessment = Assessment()
        self.transcript: list[TranscriptEntry] = []
        self.records: list[FiringRecord] = []
        self.asked: list[tuple[str, str]] = []  # (topic id, variant)
        self.history: list[tuple[str, Assessment]] = []
        self.done = False
        report = self.engine.tick()
        self.records.extend(report.records)
        self.current_topic, self.current_question = self._select()
        self._log_utterance(self.current_question, self.current_topic)

    # -- selection -------------------------------------------------------------

    def _select(self) -> tuple[TopicDecl, Question]:
        if not self.remaining:
            raise InterviewComplete("interview complete")
        if self.profile.affect_goal is None:
            topic = self.remaining.pop(0)
            question = topic.question("neutral") or topic.questions[0]
            self.asked.append((topic.id, question.variant))
            return topic, question
        from .projection import predict_impact

        sign = 1.0 if self.profile.affect_goal == "positive" else -1.0
        best = None
        for topic in self.remaining:
            for question in topic.questions:
                score = predict_impact(
                    self.engine.state,
                    self.candidate,
                    question.event,
                    self.engine.theory,
                    self.engine.thresholds,
                    self.engine.rules,
                    expect=question.expect,
                )
                self.records.append(
                    FiringRecord(
                        self.engine.tick_index,
                        "select_question",
                        "predict_impact",
                        render_bindings(
                            {"topic": topic.id, "variant": question.variant}
                        ),
                        serialize_event(question.event),
                        repr(float(score)),
                    )
                )
                aligned = sign * score
                if best is None or aligned > best[0]:
                    best = (aligned, topic, question)
        _, topic, question = best
        self.remaining.remove(topic)
        self.asked.append((topic.id, question.variant))
        return topic, question

    def _log_utterance(self, question: Question, topic: TopicDecl):
        self.transcript.append(
            TranscriptEntry("recruiter", question.utterance, topic.id, self.assessment)
        )

    # -- turns -------------------------------------------------------------------

    def post_turn(self, answer_text: str, affects: AffectVector) -> TurnResult:
        if self.done:
            raise InterviewComplete("interview complete")
        topic = self.current_topic
        facts, deltas = interpret_affects(topic, affects)
        self.assessment = self.assessment.apply(deltas)
        self.history.append((topic.id, self.assessment))
        self.transcript.append(
            TranscriptEntry("candidate", answer_text, topic.id, self.assessment)
        )
        answer_event = Event(
            self.candidate,
            self.engine.state.owner,
            SpeechAct("Express", Atom(f"answered_{topic.id}")),
        )
        report = self.engine.tick(
            [self.current_question.event, answer_event], outside_facts=facts
        )
        self.records.extend(report.records)

        if self.remaining:
            self.current_topic, self.current_question = self._select()
            self._log_utterance(self.current_question, self.current_topic)
            utterance = self.current_question.utterance
            topic_id = self.current_topic.id
        else:
            self.done = True
            utterance = FAREWELL
            topic_id = None
            self.transcript.append(TranscriptEntry("recruiter", FAREWELL, None, self.assessment))

        return TurnResult(
            utterance=utterance,
            topic_id=topic_id,
            recruiter_valence=self.valence(),
            assessment=self.assessment,
            predicted=list(report.predicted),
            interview_done=self.done,
        )

    def valence(self) -> float:
        total = 0.0
        for emo in self.engine.state.emotions:
            total += valence_of(emo.kind, self.engine.theory) * emo.intensity
        return max(-1.0, min(1.0, total))

    def trace_lines(self) -> list[str]:
        return [r.line() for r in self.records]
