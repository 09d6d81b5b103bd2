"""Forward-chaining folk-psychology rules over one mental state.

Each pass function inspects the state and returns `Firing` objects; the
engine loop applies them, which keeps rule logic pure and the trace
deterministic. A firing is only produced when it would change the state,
so a stage fixpoint is simply "no firings left".

Belief-chaining and responsibility propagation strengthen degrees only
(they never weaken an existing derived belief), which makes the immediate
fixpoint terminate: every firing raises some stored degree by at least the
comparison tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .logic import (
    Att,
    Bel,
    Des,
    Dom,
    Emo,
    Event,
    EventProp,
    Formula,
    Future,
    Globally,
    Ideal,
    Int,
    Like,
    Resp,
    SpeechAct,
    Thresholds,
    avg_unit,
    canonicalize,
    deg_eq,
    deg_gt,
    deg_lt,
    formula_depth,
    is_witness,
    match,
    mean,
    negate,
    overlap,
    rename_agent,
    subsumes,
    substitute,
)
from .parsing import serialize_event, serialize_formula
from .scenario import Guard, GoalPattern, RuleDecl
from .state import MentalState


class NotWitnessError(ValueError):
    """The observing agent took no part in the event."""


class RuleLimitError(RuntimeError):
    """A declarative rule ran away, growing formulas without bound."""


_MAX_EFFECT_DEPTH = 120


# --------------------------------------------------------------------------
# Effects and firings
# --------------------------------------------------------------------------


@dataclass
class BeliefEffect:
    content: Formula
    degree: float


@dataclass
class AttitudeEffect:
    content: Formula
    degree: float


@dataclass
class IntentionEffect:
    content: Formula


@dataclass
class RetractIntention:
    content: Formula


@dataclass
class RelationEffect:
    kind: str  # "like" | "dom"
    other: str
    degree: float


@dataclass
class EmotionEffect:
    kind: str
    target: Optional[str]
    intensity: float
    about: Formula


@dataclass
class EventEffect:
    event: Event


@dataclass
class Firing:
    rule: str
    bindings: dict
    effect: object  # one of the effect dataclasses, or None for pure records
    timing: str  # "now" | "next" | "note"
    degree: Optional[float] = None

    def effect_text(self) -> str:
        e = self.effect
        if isinstance(e, BeliefEffect):
            return f"Bel:{serialize_formula(e.content)}"
        if isinstance(e, AttitudeEffect):
            return f"Att:{serialize_formula(e.content)}"
        if isinstance(e, IntentionEffect):
            return f"Int:{serialize_formula(e.content)}"
        if isinstance(e, RetractIntention):
            return f"drop Int:{serialize_formula(e.content)}"
        if isinstance(e, RelationEffect):
            return f"{e.kind}:{e.other}"
        if isinstance(e, EmotionEffect):
            target = e.target or "_"
            return f"Emo:{e.kind}:{target}:{serialize_formula(e.about)}"
        if isinstance(e, EventEffect):
            return serialize_event(e.event)
        return "-"


@dataclass(frozen=True)
class FiringRecord:
    tick: int
    stage: str
    rule: str
    bindings: str
    effect: str
    degree: str

    def line(self) -> str:
        return f"{self.tick}|{self.stage}|{self.rule}|{self.bindings}|{self.effect}|{self.degree}"


def render_bindings(bindings: dict) -> str:
    parts = []
    for key in sorted(bindings):
        value = bindings[key]
        if isinstance(value, Formula):
            text = serialize_formula(value)
        elif isinstance(value, Event):
            text = serialize_event(value)
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        parts.append(f"{key}={text}")
    return ",".join(parts)


# --------------------------------------------------------------------------
# Rule catalog
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RuleInfo:
    name: str
    stage: str
    premises: str
    guards: str
    effect: str
    timing: str


RULE_CATALOG: dict[str, RuleInfo] = {}


def _catalog(name, stage, premises, guards, effect, timing):
    RULE_CATALOG[name] = RuleInfo(name, stage, premises, guards, effect, timing)


_catalog(
    "derive_belief",
    "update_beliefs",
    "Bel(self,l,psi); Bel(self,li,psi -> phi)",
    "l > mod_th; li > mod_th; strengthens only",
    "Bel(self,avg(l,li),phi)",
    "now",
)
_catalog(
    "propagate_responsibility",
    "update_beliefs",
    "Bel(self,d,psi); Bel(self,l,Resp(b,psi)); Bel(self,lp,phi); Bel(self,ls,psi -> F(phi))",
    "each belief > mod_th; strengthens only",
    "Bel(self,mean(l,lp,ls),Resp(b,phi))",
    "now",
)
_catalog(
    "update_attitude",
    "update_beliefs",
    "Bel(self,l,phi); Att(self,k,F(phi)); Bel(self,lb,Att(b,kb,F(phi))); Like(self,b,h); Dom(self,b,hd)",
    "l > str_th; lb > mod_th",
    "Att(self,avg(k,kb,h,hd),phi)",
    "now",
)
_catalog(
    "adopt_shared_desire",
    "update_beliefs",
    "Bel(self,l,Des(b,k,phi)); Like(self,b,h)",
    "l > str_th; h > 0",
    "Des(self,avg(k,h),phi)",
    "next",
)
_catalog(
    "adopt_desire",
    "adopt_desires",
    "Des(self,k,phi); Bel(self,l,psi -> F(phi))",
    "l > str_th; no inconsistent-desire witness for psi",
    "Des(self,k,psi)",
    "next",
)
_catalog(
    "block_inconsistent_desire",
    "adopt_desires",
    "candidate psi; Bel(self,l,psi -> chi); Des(self,kd,...)",
    "l > str_th; sign-opposed outcome",
    "adoption suppressed",
    "note",
)
_catalog(
    "block_weakly_inconsistent_desire",
    "order_goals",
    "Des(self,k,phi); Bel(self,l,phi -> chi); Des(self,kd,...)",
    "l > str_th; abs(kd) > abs(k); sign-opposed outcome",
    "goal suppressed",
    "note",
)
_catalog(
    "admit_goal",
    "order_goals",
    "Des(self,k,phi); achievability of phi",
    "k > des_th; no weak-inconsistency witness",
    "goal(phi,k)",
    "note",
)
_catalog(
    "intend_own_action",
    "adopt_intentions",
    "goal(eps,k); eps is an act of self",
    "k > 0",
    "Int(self,eps)",
    "next",
)
_catalog(
    "intend_means",
    "adopt_intentions",
    "goal(phi,k); Bel(self,l,psi -> F(phi)); achievability of psi",
    "l > str_th; no weak-inconsistency witness for psi; best-ranked mean",
    "Int(self,psi)",
    "next",
)
_catalog(
    "chain_intention",
    "adopt_intentions",
    "Int(self,phi); Bel(self,l,psi -> F(phi))",
    "l > str_th",
    "Int(self,psi)",
    "now",
)
_catalog(
    "suppress_conflicting_intention",
    "adopt_intentions",
    "Int(self,!phi) held",
    "",
    "intention dropped",
    "note",
)
_catalog(
    "perform_intention",
    "execute_intentions",
    "Int(self,eps); eps is an act of self",
    "eps concrete",
    "event eps occurs next step",
    "next",
)
_catalog(
    "witness_event",
    "update_beliefs",
    "event eps occurred; self is actor or recipient",
    "",
    "Bel(self,1,eps); Bel(self,1,Bel(other,1,eps)); Bel(self,1,Resp(actor,eps))",
    "now",
)
_catalog(
    "emit_request",
    "generate_speech_acts",
    "Int(self,Int(b,phi)); not Bel(self,1,Int(b,phi))",
    "request not already uttered",
    "<self,b,Request(phi)>",
    "now",
)
_catalog(
    "accept_assertion",
    "apply_perlocutions",
    "<b,self,Assert(phi)> occurred; Like(self,b,h); Dom(self,b,hd)",
    "",
    "Bel(self,avg(h,hd),phi)",
    "next",
)
_catalog(
    "accept_request",
    "apply_perlocutions",
    "<b,self,Request(phi)> occurred; Dom(self,b,hd)",
    "hd < 0",
    "Int(self,phi)",
    "next",
)


# --------------------------------------------------------------------------
# Built-in passes
# --------------------------------------------------------------------------


def derive_beliefs_pass(state: MentalState, th: Thresholds) -> list[Firing]:
    """Chain believed implications into new graded beliefs."""
    firings = []
    impls = state.implication_beliefs(th.mod_th)
    for key, l in list(state.beliefs.items()):
        if not deg_gt(l, th.mod_th):
            continue
        for left, right, li in impls:
            if not (subsumes(left, key) or overlap(left, key)):
                continue
            degree = avg_unit(l, li)
            existing = state.belief(right)
            if existing is not None and not deg_gt(degree, existing):
                continue
            firings.append(
                Firing(
                    "derive_belief",
                    {"psi": key, "l": l, "li": li, "phi": right},
                    BeliefEffect(right, degree),
                    "now",
                    degree,
                )
            )
    return firings


def propagate_responsibility_pass(state: MentalState, th: Thresholds) -> list[Firing]:
    """Extend believed responsibility from causes onto believed outcomes."""
    firings = []
    resp_beliefs = [
        (key, l) for key, l in state.beliefs.items() if isinstance(key, Resp) and deg_gt(l, th.mod_th)
    ]
    if not resp_beliefs:
        return firings
    impls = [
        (left, right.body, l)
        for left, right, l in state.implication_beliefs(th.mod_th)
        if isinstance(right, Future)
    ]
    for resp_key, l_resp in resp_beliefs:
        cause = resp_key.body
        d = state.belief(cause)
        if d is None or not deg_gt(d, th.mod_th):
            continue
        for left, outcome, l_impl in impls:
            if not overlap(left, cause):
                continue
            l_out = state.belief(outcome)
            if l_out is None or not deg_gt(l_out, th.mod_th):
                continue
            target = canonicalize(Resp(resp_key.agent, outcome))
            degree = mean(l_resp, l_out, l_impl)
            existing = state.belief(target)
            if existing is not None and not deg_gt(degree, existing):
                continue
            firings.append(
                Firing(
                    "propagate_responsibility",
                    {"b": resp_key.agent, "psi": cause, "phi": outcome, "l": l_resp,
                     "lp": l_out, "ls": l_impl},
                    BeliefEffect(target, degree),
                    "now",
                    degree,
                )
            )
    return firings


def update_attitudes_pass(state: MentalState, th: Thresholds) -> list[Firing]:
    """Attitudes toward facts that just became current, socially modulated."""
    firings = []
    desire_keys = [(key, k) for key, k in state.attitudes.items() if isinstance(key, Future)]
    if not desire_keys:
        return firings
    nested = [
        (key, l)
        for key, l in state.beliefs.items()
        if isinstance(key, Att) and isinstance(key.body, Future) and key.agent != state.owner
        and deg_gt(l, th.mod_th)
    ]
    for fut_key, k in desire_keys:
        chi = fut_key.body
        for fact_key, l_fact in state.beliefs.items():
            if not deg_gt(l_fact, th.str_th) or not overlap(fact_key, chi):
                continue
            for att_key, l_att in nested:
                if not overlap(att_key.body.body, chi):
                    continue
                b = att_key.agent
                if not isinstance(b, str):
                    continue
                h, hd = state.like(b), state.dom(b)
                if h is None or hd is None:
                    continue
                degree = avg_unit(k, att_key.degree, h, hd)
                existing = state.attitude(fact_key)
                if existing is not None and deg_eq(existing, degree):
                    continue
                firings.append(
                    Firing(
                        "update_attitude",
                        {"phi": fact_key, "k": k, "kb": att_key.degree, "h": h, "hd": hd, "b": b},
                        AttitudeEffect(fact_key, degree),
                        "now",
                        degree,
                    )
                )
    return firings


def _believed_desires(state: MentalState, floor: float):
    """Readings (b, content, degree, certainty) of beliefs about others' desires."""
    out = []
    for key, l in state.beliefs.items():
        if not isinstance(key, Att) or key.agent == state.owner or not isinstance(key.agent, str):
            continue
        if not deg_gt(l, floor):
            continue
        if isinstance(key.body, Future):
            out.append((key.agent, key.body.body, key.degree, l))
        elif isinstance(key.body, Globally):
            out.append((key.agent, negate(key.body.body), -key.degree, l))
    return out


def contagion_pass(state: MentalState, th: Thresholds) -> list[Firing]:
    """Desires spread from agents the owner likes."""
    firings = []
    for b, content, kb, _l in _believed_desires(state, th.str_th):
        h = state.like(b)
        if h is None or not deg_gt(h, 0.0):
            continue
        degree = avg_unit(kb, h)
        target = canonicalize(Future(content))
        existing = state.attitude(target)
        if existing is not None and deg_eq(existing, degree):
            continue
        firings.append(
            Firing(
                "adopt_shared_desire",
                {"b": b, "phi": content, "k": kb, "h": h},
                AttitudeEffect(target, degree),
                "next",
                degree,
            )
        )
    return firings


def adopt_desires_pass(state: MentalState, th: Thresholds) -> list[Firing]:
    """Means adoption: want what is strongly believed to bring about a want."""
    firings = []
    impls = [
        (left, right.body, l)
        for left, right, l in state.implication_beliefs(th.str_th)
        if isinstance(right, Future)
    ]
    if not impls:
        return firings
    for reading in state.attitude_readings():
        if reading.flavor != "des":
            continue
        for left, outcome, l in impls:
            if not overlap(outcome, reading.content):
                continue
            target = canonicalize(Future(left))
            existing = state.attitude(target)
            if existing is not None and deg_eq(existing, reading.degree):
                continue
            witness = state.inconsistency_witness(left, th)
            if witness is not None:
                firings.append(
                    Firing(
                        "block_inconsistent_desire",
                        {"psi": left, "k": reading.degree,
                         "conflict": witness[0], "kd": witness[1]},
                        None,
                        "note",
                    )
                )
                continue
            firings.append(
                Firing(
                    "adopt_desire",
                    {"phi": reading.content, "psi": left, "k": reading.degree, "l": l},
                    AttitudeEffect(target, reading.degree),
                    "next",
                    reading.degree,
                )
            )
    return firings


def order_goals_pass(state: MentalState, th: Thresholds):
    """Compute the goal agenda: filter weak inconsistencies, then admit.

    Returns (goals, firings) where goals is the ordered list of
    (content, degree) pairs feeding intention adoption.
    """
    firings = []
    goals = []
    candidates = state.desire_candidates(th)
    blocked = set()
    for content, k in candidates:
        witness = state.inconsistency_witness(content, th, stronger_than=k)
        if witness is not None:
            blocked.add(serialize_formula(content))
            firings.append(
                Firing(
                    "block_weakly_inconsistent_desire",
                    {"phi": content, "k": k, "conflict": witness[0], "kd": witness[1]},
                    None,
                    "note",
                    k,
                )
            )
    for content, k in candidates:
        if serialize_formula(content) in blocked:
            continue
        if not deg_gt(k, 0.0):
            continue
        if state.achievability(content) is None:
            continue
        goals.append((content, k))
        firings.append(
            Firing("admit_goal", {"phi": content, "k": k}, None, "note", k)
        )
    return goals, firings


def _mean_rank(state: MentalState, psi: Formula, k: float) -> float:
    l = state.achievability(psi)
    return avg_unit(l if l is not None else 0.0, k)


def intentions_from_goals_pass(state, th: Thresholds, goals, queued) -> list[Firing]:
    """Turn goals into next-step intentions, directly or through a means.

    `queued` carries intention contents already scheduled this tick so the
    same intention is not enqueued twice.
    """
    firings = []
    for content, k in goals:
        if state.has_intention(content) or serialize_formula(content) in queued:
            continue
        direct = (
            isinstance(content, EventProp)
            and content.event.is_concrete()
            and content.event.actor == state.owner
        )
        if direct:
            queued.add(serialize_formula(content))
            firings.append(
                Firing(
                    "intend_own_action",
                    {"eps": content, "k": k},
                    IntentionEffect(content),
                    "next",
                    k,
                )
            )
            continue
        means = []
        for left, right, l in state.implication_beliefs(th.str_th):
            if not isinstance(right, Future) or not overlap(right.body, content):
                continue
            if state.inconsistency_witness(left, th, stronger_than=k) is not None:
                continue
            if state.achievability(left) is None:
                continue
            means.append(left)
        if not means:
            continue
        means.sort(key=lambda m: (-_mean_rank(state, m, k), serialize_formula(m)))
        best = means[0]
        if state.has_intention(best) or serialize_formula(best) in queued:
            continue
        queued.add(serialize_formula(best))
        firings.append(
            Firing(
                "intend_means",
                {"phi": content, "psi": best, "k": k},
                IntentionEffect(best),
                "next",
                k,
            )
        )
    return firings


def intentions_from_intentions_pass(state: MentalState, th: Thresholds) -> list[Firing]:
    """Intend the known means of what is already intended; immediate."""
    firings = []
    impls = [
        (left, right.body, l)
        for left, right, l in state.implication_beliefs(th.str_th)
        if isinstance(right, Future)
    ]
    for intention in list(state.intentions):
        for left, outcome, _l in impls:
            if not overlap(outcome, intention):
                continue
            if state.has_intention(left):
                continue
            firings.append(
                Firing(
                    "chain_intention",
                    {"phi": intention, "psi": left},
                    IntentionEffect(left),
                    "now",
                )
            )
    return firings


def execute_intentions_pass(state: MentalState) -> list[Firing]:
    """Own intended acts become events at the next step."""
    firings = []
    for intention in list(state.intentions):
        if not isinstance(intention, EventProp):
            continue
        event = intention.event
        if not event.is_concrete() or event.actor != state.owner:
            continue
        firings.append(
            Firing(
                "perform_intention",
                {"eps": intention},
                EventEffect(event),
                "next",
            )
        )
    return firings


def observe_event_firings(state: MentalState, event: Event) -> list[Firing]:
    """Witness axioms for an occurred event.

    The witness is certain the event happened, certain the other witness
    believes it too, and certain the actor is responsible for it.
    """
    if not event.is_concrete():
        raise NotWitnessError(f"pattern not concrete: {event}")
    if not is_witness(state.owner, event):
        raise NotWitnessError(f"{state.owner} is not a witness of {serialize_event(event)}")
    prop = canonicalize(EventProp(event))
    firings = []
    wanted = [(prop, 1.0), (canonicalize(Resp(event.actor, prop)), 1.0)]
    others = [a for a in (event.actor, event.recipient) if a and a != state.owner]
    for other in others:
        wanted.append((canonicalize(Bel(other, 1.0, prop)), 1.0))
    for content, degree in wanted:
        existing = state.belief(content)
        if existing is not None and deg_eq(existing, degree):
            continue
        firings.append(
            Firing(
                "witness_event",
                {"eps": prop},
                BeliefEffect(content, degree),
                "now",
                degree,
            )
        )
    return firings


def generate_requests_pass(state: MentalState) -> list[Firing]:
    """Ask for what we intend others to intend, unless already believed."""
    firings = []
    for intention in list(state.intentions):
        if not isinstance(intention, Int):
            continue
        b = intention.agent
        if not isinstance(b, str) or b == state.owner:
            continue
        held = state.belief(intention)
        if held is not None and deg_eq(held, 1.0):
            continue
        event = Event(state.owner, b, SpeechAct("Request", intention.body))
        already = state.belief(EventProp(event))
        if already is not None and deg_eq(already, 1.0):
            continue
        firings.append(
            Firing(
                "emit_request",
                {"b": b, "phi": intention.body},
                EventEffect(event),
                "now",
            )
        )
    return firings


PerlocutionHandler = Callable[[MentalState, Event, Thresholds], list[Firing]]


def _assert_perlocution(state: MentalState, event: Event, th: Thresholds) -> list[Firing]:
    b = event.actor
    h, hd = state.like(b), state.dom(b)
    if h is None or hd is None:
        return []
    content = canonicalize(event.act.content)
    degree = avg_unit(h, hd)
    return [
        Firing(
            "accept_assertion",
            {"b": b, "phi": content, "h": h, "hd": hd},
            BeliefEffect(content, degree),
            "next",
            degree,
        )
    ]


def _request_perlocution(state: MentalState, event: Event, th: Thresholds) -> list[Firing]:
    b = event.actor
    hd = state.dom(b)
    if hd is None or not deg_lt(hd, 0.0):
        return []
    content = canonicalize(event.act.content)
    return [
        Firing(
            "accept_request",
            {"b": b, "phi": content, "hd": hd},
            IntentionEffect(content),
            "next",
        )
    ]


PERLOCUTIONS: dict[str, Optional[PerlocutionHandler]] = {
    "Assert": _assert_perlocution,
    "Request": _request_perlocution,
    # Registration points; no perlocutionary effect by default.
    "Commit": None,
    "Express": None,
}


def perlocutions_pass(state: MentalState, events: Iterable[Event], th: Thresholds) -> list[Firing]:
    firings = []
    for event in events:
        if not isinstance(event.act, SpeechAct):
            continue
        if event.recipient != state.owner or event.actor == state.owner:
            continue
        handler = PERLOCUTIONS.get(event.act.illocution)
        if handler is not None:
            firings.extend(handler(state, event, th))
    return firings


# --------------------------------------------------------------------------
# Declarative rules from scenario files
# --------------------------------------------------------------------------


def _guard_holds(guard: Guard, env: dict, th: Thresholds) -> Optional[bool]:
    """Evaluate a guard; None while its variables are not all bound yet."""
    if guard.lhs not in env:
        return None
    lhs = env[guard.lhs]
    if not isinstance(lhs, (int, float)):
        return False
    if guard.lhs_abs:
        lhs = abs(lhs)
    rhs = guard.rhs
    if isinstance(rhs, str):
        if rhs in ("mod_th", "str_th", "des_th"):
            rhs = getattr(th, rhs)
        elif rhs in env:
            rhs = env[rhs]
            if guard.rhs_abs:
                rhs = abs(rhs)
        else:
            return None
    if guard.op == ">":
        return deg_gt(lhs, rhs)
    if guard.op == "<":
        return deg_lt(lhs, rhs)
    if guard.op == ">=":
        return not deg_lt(lhs, rhs)
    if guard.op == "<=":
        return not deg_gt(lhs, rhs)
    return deg_eq(lhs, rhs)


def premise_targets(state: MentalState, premise: Formula, th: Thresholds):
    """Candidate facts one premise pattern can match, with provenance keys."""
    owner = state.owner
    seen = set()

    def once(target, prov):
        text = serialize_formula(target)
        if text in seen:
            return None
        seen.add(text)
        return (target, prov)

    if isinstance(premise, Bel):
        for key, l in state.beliefs.items():
            if not deg_gt(l, th.mod_th):
                continue
            item = once(Bel(owner, l, key), ("bel", key))
            if item:
                yield item
            # nested attitudes also match patterns written in the dual
            # sugar: a stored stance toward F(x) is the mirrored stance
            # toward G(!x), and dually.
            if isinstance(key, Att) and isinstance(key.body, Future):
                dual = Bel(owner, l, Att(key.agent, -key.degree, Globally(negate(key.body.body))))
                item = once(dual, ("bel", key))
                if item:
                    yield item
            elif isinstance(key, Att) and isinstance(key.body, Globally):
                dual = Bel(owner, l, Att(key.agent, -key.degree, Future(negate(key.body.body))))
                item = once(dual, ("bel", key))
                if item:
                    yield item
    elif isinstance(premise, (Att, Des, Ideal)):
        for reading in state.attitude_readings():
            if reading.flavor == "des":
                target = Att(owner, reading.degree, Future(reading.content))
            elif reading.flavor == "ideal":
                target = Att(owner, reading.degree, Globally(reading.content))
            else:
                target = Att(owner, reading.degree, reading.content)
            item = once(target, ("att", reading.key))
            if item:
                yield item
    elif isinstance(premise, Int):
        for content in state.intentions:
            item = once(Int(owner, content), ("int", content))
            if item:
                yield item
    elif isinstance(premise, Like):
        for other, k in state.likes.items():
            item = once(Like(owner, other, k), ("like", other))
            if item:
                yield item
    elif isinstance(premise, Dom):
        for other, k in state.doms.items():
            item = once(Dom(owner, other, k), ("dom", other))
            if item:
                yield item
    elif isinstance(premise, Emo):
        for emo in state.emotions:
            target = Emo(emo.kind, emo.holder, emo.target, emo.intensity, emo.about)
            item = once(target, ("emo", emo.key()))
            if item:
                yield item
    elif isinstance(premise, EventProp):
        for key, l in state.beliefs.items():
            if isinstance(key, EventProp) and deg_eq(l, 1.0):
                item = once(key, ("bel", key))
                if item:
                    yield item


def iter_rule_bindings(state, premises, guards, th: Thresholds, goal_query=None):
    """All consistent binding environments for a premise list.

    Yields (env, provenance_keys). Goal premises are resolved last through
    `goal_query(content) -> degree | None`.
    """
    plain = [p for p in premises if not isinstance(p, GoalPattern)]
    goal_premises = [p for p in premises if isinstance(p, GoalPattern)]
    envs: list[tuple[dict, list]] = [({}, [])]
    for premise in plain:
        pattern = canonicalize(rename_agent(premise, "self", state.owner))
        new_envs = []
        for env, prov in envs:
            for target, prov_key in premise_targets(state, pattern, th):
                bound = match(pattern, target, env)
                if bound is None:
                    continue
                if any(_guard_holds(g, bound, th) is False for g in guards):
                    continue
                new_envs.append((bound, prov + [prov_key]))
        envs = new_envs
        if not envs:
            return
    for env, prov in envs:
        ok = True
        for gp in goal_premises:
            content = substitute(env, rename_agent(gp.content, "self", state.owner))
            k = goal_query(content) if goal_query else None
            if k is None:
                ok = False
                break
            env = dict(env)
            env[gp.degree_var] = k
        if not ok:
            continue
        if all(_guard_holds(g, env, th) is True for g in guards):
            yield env, prov


def run_scenario_rule(state: MentalState, rule: RuleDecl, th: Thresholds, goal_query=None):
    """Execute one declarative rule, returning its firings."""
    from .logic import Next as _Next

    firings = []
    for env, _prov in iter_rule_bindings(state, rule.premises, rule.guards, th, goal_query):
        inner = substitute(env, rename_agent(rule.effect, "self", state.owner))
        if formula_depth(inner) > _MAX_EFFECT_DEPTH:
            raise RuleLimitError(
                f"rule {rule.name!r} keeps producing deeper formulas; "
                f"repeating rule: {rule.name}"
            )
        timing = rule.timing
        if isinstance(inner, _Next):
            timing = "next"
            inner = inner.body
        effect = _effect_from_formula(state, inner)
        if effect is None:
            continue
        if _is_noop(state, effect):
            continue
        degree = getattr(effect, "degree", None)
        if isinstance(effect, EmotionEffect):
            degree = effect.intensity
        firings.append(Firing(rule.name, env, effect, timing, degree))
    return firings


def _effect_from_formula(state: MentalState, phi: Formula):
    if isinstance(phi, Bel) and phi.agent == state.owner:
        return BeliefEffect(phi.body, phi.degree)
    if isinstance(phi, Att) and phi.agent == state.owner:
        return AttitudeEffect(phi.body, phi.degree)
    if isinstance(phi, Int) and phi.agent == state.owner:
        return IntentionEffect(phi.body)
    if isinstance(phi, Like) and phi.source == state.owner and isinstance(phi.target, str):
        return RelationEffect("like", phi.target, phi.degree)
    if isinstance(phi, Dom) and phi.source == state.owner and isinstance(phi.target, str):
        return RelationEffect("dom", phi.target, phi.degree)
    if isinstance(phi, Emo) and phi.holder == state.owner:
        return EmotionEffect(phi.kind, phi.target, phi.intensity, phi.body)
    return None


def _is_noop(state: MentalState, effect) -> bool:
    if isinstance(effect, BeliefEffect):
        held = state.belief(effect.content)
        return held is not None and deg_eq(held, effect.degree)
    if isinstance(effect, AttitudeEffect):
        held = state.attitude(effect.content)
        return held is not None and deg_eq(held, effect.degree)
    if isinstance(effect, IntentionEffect):
        return state.has_intention(effect.content)
    if isinstance(effect, RelationEffect):
        store = state.likes if effect.kind == "like" else state.doms
        held = store.get(effect.other)
        return held is not None and deg_eq(held, effect.degree)
    return False


def apply_effect(state: MentalState, effect, tick: int) -> bool:
    """Apply one effect to the state; True if the state changed."""
    if isinstance(effect, BeliefEffect):
        return state.assert_belief(effect.content, effect.degree)
    if isinstance(effect, AttitudeEffect):
        return state.assert_attitude(effect.content, effect.degree)
    if isinstance(effect, IntentionEffect):
        return state.add_intention(effect.content)
    if isinstance(effect, RetractIntention):
        state.drop_intention(effect.content)
        return True
    if isinstance(effect, RelationEffect):
        if effect.kind == "like":
            state.set_like(effect.other, effect.degree)
        else:
            state.set_dom(effect.other, effect.degree)
        return True
    raise TypeError(f"engine-level effect {effect!r} cannot be applied directly")
