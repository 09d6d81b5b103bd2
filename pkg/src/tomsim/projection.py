"""Simulation-theory step: run the interlocutor's attributed mental state
through the owner's own machinery to predict emotions and score candidate
acts by their predicted affective impact.

Projection depth is 1: the simulated other does not itself simulate the
owner. The predicted-emotion certainty is the minimum certainty of the
attributed facts the appraisal consumed (conservative).
"""
from __future__ import annotations


from .emotions import AppraisalResult, AppraisalTheory, appraise, valence_of
from .inference import (
    Firing,
    BeliefEffect,
    apply_effect,
    derive_beliefs_pass,
    observe_event_firings,
    perlocutions_pass,
    propagate_responsibility_pass,
    run_scenario_rule,
    update_attitudes_pass,
)
from .logic import Bel, Emo, Event, Thresholds, canonicalize, is_responsible
from .state import EmotionInstance, MentalState

_PROJECTION_CAP = 2000


def _immediate_fixpoint(view: MentalState, th: Thresholds, rules=()):
    fired = 0
    while True:
        firings = derive_beliefs_pass(view, th)
        firings += propagate_responsibility_pass(view, th)
        firings += update_attitudes_pass(view, th)
        for rule in rules:
            firings += [f for f in run_scenario_rule(view, rule, th) if f.timing == "now"]
        applied = 0
        for firing in firings:
            if firing.effect is None:
                continue
            if apply_effect(view, firing.effect, 0):
                applied += 1
        fired += applied
        if applied == 0 or fired > _PROJECTION_CAP:
            return


def _certainty_floor(result: AppraisalResult, certainty: dict) -> float:
    values = [certainty[key] for key in result.provenance if key in certainty]
    return min(values) if values else 1.0


def simulate_other(
    state: MentalState,
    other: str,
    theory: AppraisalTheory,
    th: Thresholds,
    tick: int,
    rules=(),
):
    """Predict the other's emotions from its attributed state.

    Returns (instances, firings); the firings assert the predictions back
    into the owner's state as beliefs about the other's emotions.
    """
    view, certainty = state.attributed_with_certainty(other, th)
    _immediate_fixpoint(view, th, rules)
    results = appraise(view, theory, th, tick)
    instances: list[EmotionInstance] = []
    firings: list[Firing] = []
    for result in results:
        if result.suppressed_by is not None:
            continue
        inst = result.instance
        instances.append(inst)
        l_sim = _certainty_floor(result, certainty)
        content = canonicalize(
            Emo(inst.kind, other, inst.target, inst.intensity, inst.about)
        )
        firings.append(
            Firing(
                "simulate_other",
                {"other": other, "kind": inst.kind, "about": inst.about},
                BeliefEffect(content, l_sim),
                "now",
                l_sim,
            )
        )
    return instances, firings


def predict_impact(
    state: MentalState,
    other: str,
    candidate: Event,
    theory: AppraisalTheory,
    th: Thresholds,
    rules=(),
    expect: float = 0.0,
) -> float:
    """Score a candidate act by the emotions it should elicit in the other.

    Positive-valence predicted intensities add, negative ones subtract, and
    the scenario-declared expectation offset shifts the total. Pure in the
    state: works on a freshly compiled attributed view.
    """
    if not is_responsible(state.owner, candidate):
        raise ValueError(f"{state.owner} is not the actor of the candidate act")
    view, _certainty = state.attributed_with_certainty(other, th)
    for firing in observe_event_firings(view, candidate):
        apply_effect(view, firing.effect, 0)
    # one-step lookahead: perlocutionary effects land inside the simulation
    for firing in perlocutions_pass(view, [candidate], th):
        if firing.effect is not None:
            apply_effect(view, firing.effect, 0)
    _immediate_fixpoint(view, th, rules)
    score = expect
    for result in appraise(view, theory, th, 0):
        if result.suppressed_by is not None:
            continue
        inst = result.instance
        score += valence_of(inst.kind, theory) * inst.intensity
    return score
