"""Graded-belief theory-of-mind reasoning engine with a job-interview
simulation layer.

The core is a modal language of graded beliefs, attitudes, intentions and
emotions over a dyadic interaction, a forward-chaining folk-psychology rule
engine, an appraisal-based emotional inference engine, and a
simulation-theory projection step that runs the interlocutor's attributed
mental state through the same machinery.
"""

from .logic import (
    ANY,
    Att,
    Atom,
    Bel,
    DegreeError,
    Des,
    Dom,
    Emo,
    Event,
    EventProp,
    Formula,
    Ideal,
    Int,
    Like,
    Not,
    Resp,
    SpeechAct,
    Thresholds,
    canonicalize,
    is_responsible,
    is_witness,
    match,
    register_emotion_kind,
)
from .parsing import FormulaError, parse_formula, parse_pattern, serialize_formula
from .scenario import ScenarioDoc, ScenarioError, load_scenario, parse_scenario
from .state import EmotionInstance, MentalState
from .emotions import AppraisalTheory, appraise, default_theory, intensity, parse_theory
from .engine import Engine, EngineError, Trace, run_script
from .projection import predict_impact, simulate_other
from .interview import AffectVector, Assessment, InterviewSession

__version__ = "0.1.0"

__all__ = [
    "ANY",
    "AffectVector",
    "AppraisalTheory",
    "Assessment",
    "Att",
    "Atom",
    "Bel",
    "DegreeError",
    "Des",
    "Dom",
    "Emo",
    "EmotionInstance",
    "Engine",
    "EngineError",
    "Event",
    "EventProp",
    "Formula",
    "FormulaError",
    "Ideal",
    "Int",
    "InterviewSession",
    "Like",
    "MentalState",
    "Not",
    "Resp",
    "ScenarioDoc",
    "ScenarioError",
    "SpeechAct",
    "Thresholds",
    "Trace",
    "appraise",
    "canonicalize",
    "default_theory",
    "intensity",
    "is_responsible",
    "is_witness",
    "load_scenario",
    "match",
    "parse_formula",
    "parse_pattern",
    "parse_scenario",
    "parse_theory",
    "predict_impact",
    "register_emotion_kind",
    "run_script",
    "serialize_formula",
    "simulate_other",
]
