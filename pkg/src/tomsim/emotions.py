"""Emotional inference: intensity computation and a pluggable appraisal table.

The default table holds the five shipped appraisal rules (Joy, Fear,
Gloating, Admiration, Gratitude), declared in the same rule syntax a theory
file uses, so swapping the theory in or out is one `parse_theory` call away.

Intensity combines a linear influence of attitude strength with a
logarithmic influence of certainty, renormalized so the result is monotone
in both and lands in [0.5, 1]. The exact printed historical form of that
combination underflows toward 0 for near-certain beliefs; it is kept behind
`literal=True` for study, while the normalized form is the default.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Optional

from .logic import (
    Formula,
    Thresholds,
    emotion_valence,
    is_emotion_kind,
    mean,
    register_emotion_kind,
    temporal_free,
)
from .parsing import FormulaError, FormulaParser, TokenStream, serialize_formula, tokenize
from .scenario import GoalPattern, Guard, parse_guard
from .state import EmotionInstance, MentalState

# ln of the smallest positive normal binary64, about -708.396
LOG_FLOOR = math.log(sys.float_info.min)


class CertaintyFloorError(ValueError):
    """Intensity is undefined for certainty at or below 0.5."""


def intensity(certainty: float, strength: float, literal: bool = False) -> float:
    """Emotion intensity from belief certainty and attitude magnitude.

    Monotone nondecreasing in both arguments; range [0.5, 1] for nonzero
    strength and exactly 0.5 at zero strength. Raises below the certainty
    floor, where the log term is undefined.
    """
    if certainty <= 0.5:
        raise CertaintyFloorError(f"certainty {certainty} is not above 0.5")
    log_term = math.log(2 * certainty - 1)
    if literal:
        value = (strength / 2) * ((log_term - LOG_FLOOR) / LOG_FLOOR) + 0.5
    else:
        value = 0.5 + (abs(strength) / 2) * (1 - log_term / LOG_FLOOR)
    return min(1.0, max(0.5, value))


@dataclass
class AppraisalRule:
    """One emotion trigger: premises and how to read intensity off them.

    The degree roles a finer-grained appraisal theory would distinguish
    (sense of reality, unexpectedness, likelihood, realization,
    praiseworthiness) all map onto the certainty/strength pair here:
    certainty variables are averaged, strength variables are averaged by
    magnitude, and the two feed the intensity function.
    """

    kind: str
    valence: float
    premises: list
    guards: list[Guard]
    about_var: str
    certainty_vars: list[str]
    strength_vars: list[str]
    target_var: Optional[str] = None


@dataclass
class AppraisalTheory:
    name: str
    rules: list[AppraisalRule]

    def __post_init__(self):
        seen = set()
        for rule in self.rules:
            if rule.kind in seen:
                raise ValueError(f"theory {self.name!r} declares {rule.kind} twice")
            seen.add(rule.kind)


@dataclass
class AppraisalResult:
    instance: EmotionInstance
    provenance: list
    suppressed_by: Optional[str] = None


def appraise(
    state: MentalState,
    theory: AppraisalTheory,
    th: Thresholds,
    tick: int,
    goal_query=None,
) -> list[AppraisalResult]:
    """Run every appraisal rule over the state snapshot.

    Returns one result per firing, more specific kinds first. When a
    Gratitude instance and an Admiration instance share target and content,
    the Admiration instance is marked suppressed (it still appears in the
    firing records, but produces no emotion).
    """
    from .inference import iter_rule_bindings

    if goal_query is None:
        goal_query = lambda content: state.query_goal(content, th)
    results: list[AppraisalResult] = []
    for rule in theory.rules:
        for env, prov in iter_rule_bindings(state, rule.premises, rule.guards, th, goal_query):
            about = env.get(rule.about_var)
            if not isinstance(about, Formula) or not temporal_free(about):
                continue
            target = None
            if rule.target_var is not None:
                bound = env.get(rule.target_var)
                if not isinstance(bound, str):
                    continue
                target = bound
            certainty = mean(*(env[v] for v in rule.certainty_vars))
            strength = mean(*(abs(env[v]) for v in rule.strength_vars))
            value = intensity(certainty, strength)
            instance = EmotionInstance(rule.kind, state.owner, target, value, about, tick)
            results.append(AppraisalResult(instance, prov))
    _apply_specificity(results)
    return results


def _apply_specificity(results: list[AppraisalResult]) -> None:
    gratitude = {
        (r.instance.target, serialize_formula(r.instance.about))
        for r in results
        if r.instance.kind == "Gratitude"
    }
    for r in results:
        if r.instance.kind != "Admiration":
            continue
        key = (r.instance.target, serialize_formula(r.instance.about))
        if key in gratitude:
            r.suppressed_by = "Gratitude"


# --------------------------------------------------------------------------
# Theory files
# --------------------------------------------------------------------------


def parse_theory(text: str, name: str = "<theory>") -> AppraisalTheory:
    """Load an appraisal theory from its declarative source form."""
    ts = TokenStream(tokenize(text))
    tok = ts.peek()
    if tok.kind != "IDENT" or tok.text != "theory":
        raise FormulaError("expected 'theory'", tok.span)
    ts.next()
    tok = ts.peek()
    if tok.kind != "IDENT":
        raise FormulaError("expected a theory name", tok.span)
    theory_name = tok.text
    ts.next()
    ts.expect("{")
    rules = []
    while not ts.take("}"):
        tok = ts.peek()
        if tok.kind == "EOF":
            raise FormulaError("unterminated theory block", tok.span)
        if tok.kind != "IDENT" or tok.text != "emotion":
            raise FormulaError("expected an 'emotion' block", tok.span)
        rules.append(_parse_emotion_rule(ts))
    tail = ts.peek()
    if tail.kind != "EOF":
        raise FormulaError(f"trailing input {tail.text!r}", tail.span)
    return AppraisalTheory(theory_name, rules)


def _parse_emotion_rule(ts: TokenStream) -> AppraisalRule:
    ts.next()  # emotion
    kind_tok = ts.peek()
    if kind_tok.kind != "IDENT":
        raise FormulaError("expected an emotion kind", kind_tok.span)
    kind = kind_tok.text
    ts.next()
    val_tok = ts.peek()
    if val_tok.kind != "IDENT" or val_tok.text not in ("positive", "negative"):
        raise FormulaError("expected 'positive' or 'negative'", val_tok.span)
    valence = 1.0 if val_tok.text == "positive" else -1.0
    ts.next()
    if not is_emotion_kind(kind):
        register_emotion_kind(kind, valence)
    ts.expect("{")
    parser = FormulaParser(ts, allow_vars=True)
    premises, guards = [], []
    about_var, target_var = None, None
    certainty_vars: list[str] = []
    strength_vars: list[str] = []
    while not ts.take("}"):
        tok = ts.peek()
        if tok.kind == "EOF":
            raise FormulaError("unterminated emotion block", tok.span)
        if tok.kind != "IDENT":
            raise FormulaError(f"unexpected token {tok.text!r}", tok.span)
        word = tok.text
        ts.next()
        if word == "when":
            premises.append(_parse_premise(ts, parser))
            if ts.peek().kind == "IDENT" and ts.peek().text == "if":
                ts.next()
                guards.append(parse_guard(ts))
                while ts.take(","):
                    guards.append(parse_guard(ts))
        elif word == "about":
            about_var = _var_name(ts)
        elif word == "target":
            target_var = _var_name(ts)
        elif word == "certainty":
            certainty_vars = _var_list(ts)
        elif word == "strength":
            strength_vars = _var_list(ts)
        else:
            raise FormulaError(f"unexpected keyword {word!r} in emotion block", tok.span)
    if about_var is None or not certainty_vars or not strength_vars or not premises:
        raise FormulaError(
            f"emotion {kind} needs premises, about, certainty and strength", kind_tok.span
        )
    return AppraisalRule(
        kind, valence, premises, guards, about_var, certainty_vars, strength_vars, target_var
    )


def _parse_premise(ts: TokenStream, parser: FormulaParser):
    tok = ts.peek()
    if (
        tok.kind == "IDENT"
        and tok.text == "Goal"
        and ts.peek(1).kind == "PUNCT"
        and ts.peek(1).text == "("
    ):
        ts.next()
        ts.next()
        agent = ts.peek()
        if agent.kind != "IDENT" or agent.text != "self":
            raise FormulaError("goal premises read the owner's goals: Goal(self, ...)", agent.span)
        ts.next()
        ts.expect(",")
        var = ts.peek()
        if var.kind != "VAR":
            raise FormulaError("expected a degree variable", var.span)
        ts.next()
        ts.expect(",")
        content = parser.formula()
        ts.expect(")")
        return GoalPattern(var.text, content)
    return parser.formula()


def _var_name(ts: TokenStream) -> str:
    tok = ts.peek()
    if tok.kind != "VAR":
        raise FormulaError("expected a variable", tok.span)
    ts.next()
    return tok.text


def _var_list(ts: TokenStream) -> list[str]:
    out = [_var_name(ts)]
    while ts.peek().kind == "VAR":
        out.append(_var_name(ts))
    return out


DEFAULT_THEORY_SOURCE = """
theory occ_default {
  emotion Joy positive {
    when Bel(self, ?l, ?g) if ?l > mod_th
    when Att(self, ?k, ?g) if ?k > 0
    about ?g
    certainty ?l
    strength ?k
  }
  emotion Fear negative {
    when Bel(self, ?l, F(?g)) if ?l > mod_th
    when Des(self, ?k, ?g) if ?k < 0
    about ?g
    certainty ?l
    strength ?k
  }
  emotion Gloating positive {
    when Bel(self, ?d, ?g) if ?d > mod_th
    when Bel(self, ?l, Att(?b, ?k, ?g)) if ?l > mod_th, ?k < 0
    when Like(self, ?b, ?h) if ?h < 0
    about ?g
    target ?b
    certainty ?l ?d
    strength ?k ?h
  }
  emotion Admiration positive {
    when Bel(self, ?l, ?g) if ?l > mod_th
    when Ideal(self, ?k, ?g) if ?k > 0
    when Bel(self, ?lr, Resp(?b, ?g)) if ?lr > mod_th
    about ?g
    target ?b
    certainty ?l ?lr
    strength ?k
  }
  emotion Gratitude positive {
    when Bel(self, ?l, ?g) if ?l > mod_th
    when Ideal(self, ?k, ?g) if ?k > 0
    when Bel(self, ?lr, Resp(?b, ?g)) if ?lr > mod_th
    when Goal(self, ?kg, ?g)
    about ?g
    target ?b
    certainty ?l ?lr
    strength ?k ?kg
  }
}
"""


def default_theory() -> AppraisalTheory:
    return parse_theory(DEFAULT_THEORY_SOURCE, "occ_default")


def valence_of(kind: str, theory: Optional[AppraisalTheory] = None) -> float:
    if theory is not None:
        for rule in theory.rules:
            if rule.kind == kind:
                return rule.valence
    return emotion_valence(kind)
