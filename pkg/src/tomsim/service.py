"""HTTP session service for live interviews.

A thin adapter over `InterviewSession`: every response field is computed by
the engine and interview layer, the transport only validates and routes.
Sessions are in-memory and each one is driven under its own lock, turns in
arrival order. Live updates stream over a server-sent-events channel.

Wire contract (JSON bodies):

    POST /sessions {profile?: "A"|"B"|"C"|"random"}
        -> {session_id, profile_id, utterance, topic_id}
    POST /sessions/{id}/turns {answer_text: str, affects: {8 channels in [0,1]}}
        -> {utterance, topic_id, recruiter_valence, assessment:
            {self_confidence, motivation, qualification},
            predicted_user_emotions: [{kind, target, intensity, about}],
            interview_done}
    GET /sessions/{id}/transcript
    GET /sessions/{id}/trace
    GET /sessions/{id}/events        (text/event-stream; ?replay=1 closes
                                      after the backlog, for polling clients)
"""
from __future__ import annotations

import json
import random
import threading
import uuid
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import StreamingResponse
from pydantic import BaseModel, Field

from .interview import AffectVector, AffectVectorError, InterviewSession
from .parsing import serialize_formula
from .scenario import AFFECT_CHANNELS, ScenarioDoc

PROFILES = ("A", "B", "C")


class CreateSessionRequest(BaseModel):
    profile: Optional[str] = None


class AffectsModel(BaseModel):
    relieved: float = Field(ge=0, le=1)
    embarrassed: float = Field(ge=0, le=1)
    hesitating: float = Field(ge=0, le=1)
    stressed: float = Field(ge=0, le=1)
    ill_at_ease: float = Field(ge=0, le=1)
    focused: float = Field(ge=0, le=1)
    aggressive: float = Field(ge=0, le=1)
    bored: float = Field(ge=0, le=1)


class TurnRequest(BaseModel):
    answer_text: str
    affects: AffectsModel


@dataclass
class _SessionBox:
    session: InterviewSession
    lock: threading.Lock = field(default_factory=threading.Lock)
    events: list[dict] = field(default_factory=list)
    condition: threading.Condition = field(default_factory=threading.Condition)

    def publish(self, kind: str, payload: dict):
        with self.condition:
            self.events.append({"event": kind, "data": payload})
            self.condition.notify_all()


def _emotion_payload(instances):
    return [
        {
            "kind": inst.kind,
            "target": inst.target,
            "intensity": inst.intensity,
            "about": serialize_formula(inst.about),
        }
        for inst in instances
    ]


def create_app(doc: ScenarioDoc, default_profile: str = "random", seed: Optional[int] = None) -> FastAPI:
    if not doc.topics:
        raise ValueError("the session service needs a scenario with interview topics")
    if len(doc.agents) < 2:
        raise ValueError("interview scenarios declare a recruiter and a candidate")
    app = FastAPI(title="interview session service")
    sessions: dict[str, _SessionBox] = {}
    rng = random.Random(seed)
    registry_lock = threading.Lock()

    def get_box(session_id: str) -> _SessionBox:
        box = sessions.get(session_id)
        if box is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return box

    @app.post("/sessions")
    def create_session(body: CreateSessionRequest):
        wanted = body.profile or default_profile
        if wanted == "random":
            profile_id = rng.choice(PROFILES)
        elif wanted in PROFILES:
            profile_id = wanted
        else:
            raise HTTPException(status_code=400, detail=f"unknown profile {wanted!r}")
        session = InterviewSession(doc, profile_id)
        session_id = uuid.uuid4().hex
        box = _SessionBox(session)
        with registry_lock:
            sessions[session_id] = box
        payload = {
            "session_id": session_id,
            "profile_id": profile_id,
            "utterance": session.current_question.utterance,
            "topic_id": session.current_topic.id,
        }
        box.publish("session", payload)
        return payload

    @app.post("/sessions/{session_id}/turns")
    def post_turn(session_id: str, body: TurnRequest):
        box = get_box(session_id)
        try:
            affects = AffectVector.from_dict(body.affects.model_dump())
        except AffectVectorError as exc:
            raise HTTPException(status_code=400, detail={"fields": exc.fields, "message": str(exc)})
        with box.lock:
            if box.session.done:
                raise HTTPException(status_code=409, detail="interview complete")
            result = box.session.post_turn(body.answer_text, affects)
        payload = {
            "utterance": result.utterance,
            "topic_id": result.topic_id,
            "recruiter_valence": result.recruiter_valence,
            "assessment": result.assessment.as_dict(),
            "predicted_user_emotions": _emotion_payload(result.predicted),
            "interview_done": result.interview_done,
        }
        box.publish("turn", payload)
        return payload

    @app.get("/sessions/{session_id}/transcript")
    def transcript(session_id: str):
        box = get_box(session_id)
        with box.lock:
            entries = [
                {
                    "speaker": e.speaker,
                    "text": e.text,
                    "topic_id": e.topic_id,
                    "assessment": e.assessment.as_dict(),
                }
                for e in box.session.transcript
            ]
        return {"transcript": entries}

    @app.get("/sessions/{session_id}/trace")
    def trace(session_id: str):
        box = get_box(session_id)
        with box.lock:
            lines = box.session.trace_lines()
        return {"trace": lines}

    @app.get("/sessions/{session_id}/events")
    def events(session_id: str, replay: int = 0):
        box = get_box(session_id)

        def stream():
            cursor = 0
            while True:
                with box.condition:
                    backlog = box.events[cursor:]
                    cursor = len(box.events)
                for item in backlog:
                    yield f"event: {item['event']}\ndata: {json.dumps(item['data'])}\n\n"
                if replay:
                    return
                with box.condition:
                    if cursor == len(box.events):
                        box.condition.wait(timeout=15.0)
                    if cursor == len(box.events):
                        yield ": keep-alive\n\n"

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/channels")
    def channels():
        return {"affects": list(AFFECT_CHANNELS)}

    _mount_ui(app)
    return app


def _mount_ui(app: FastAPI) -> None:
    from pathlib import Path

    from fastapi.staticfiles import StaticFiles

    dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if dist.is_dir():
        app.mount("/ui", StaticFiles(directory=str(dist), html=True), name="ui")
