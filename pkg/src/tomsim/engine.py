"""The per-tick reasoning loop and the deterministic trace.

Stage order within a tick, matching the interpreter loop the model runs:

    execute_intentions
    simulate_others_emotions
    update_beliefs_and_attitudes
        update_beliefs_with_new_soa   (observe incoming events, outside facts)
        handle_operators_equivalence  (no-op: formulas are kept canonical)
        <immediate rule fixpoint, self-appraisal>
        adopt_new_desires
        order_goals
    adopt_new_intentions
        adopt_new_intentions_from_goals
        adopt_new_intentions_from_intentions
    generate_speech_acts
    apply_perlocutions

Next-step effects enqueued at tick t become visible at tick t+1 exactly,
when the queue is drained at tick start. An intended own act executed at
tick t lands as an occurred event at t+1, and its intention is retracted at
that same moment.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .emotions import AppraisalTheory, appraise, default_theory
from .inference import (
    BeliefEffect,
    EmotionEffect,
    EventEffect,
    Firing,
    FiringRecord,
    IntentionEffect,
    adopt_desires_pass,
    apply_effect,
    contagion_pass,
    derive_beliefs_pass,
    execute_intentions_pass,
    generate_requests_pass,
    intentions_from_goals_pass,
    intentions_from_intentions_pass,
    observe_event_firings,
    order_goals_pass,
    perlocutions_pass,
    propagate_responsibility_pass,
    render_bindings,
    run_scenario_rule,
    update_attitudes_pass,
)
from .logic import (
    Att,
    Bel,
    Dom,
    Event,
    Formula,
    Int,
    Like,
    canonicalize,
)
from .parsing import serialize_event, serialize_formula
from .scenario import ScenarioDoc
from .state import EmotionInstance, IntentionConflict, MentalState

TRACE_VERSION = "tom-trace 1"


class EngineError(RuntimeError):
    pass


@dataclass
class TickReport:
    index: int
    incoming: list[Event]
    emitted: list[Event]
    records: list[FiringRecord]
    stages: list[str]
    goals: list[tuple[Formula, float]]
    predicted: list[EmotionInstance]
    enqueued: int
    drained: int


@dataclass
class Trace:
    scenario: str
    owner: str
    reports: list[TickReport] = field(default_factory=list)
    final_snapshot: list[str] = field(default_factory=list)

    def record_lines(self) -> list[str]:
        return [r.line() for report in self.reports for r in report.records]

    def text(self) -> str:
        lines = [f"# {TRACE_VERSION}", f"# scenario {self.scenario}", f"# owner {self.owner}"]
        for report in self.reports:
            lines.append(
                f"# tick {report.index} in={len(report.incoming)} out={len(report.emitted)} "
                f"enqueued={report.enqueued} drained={report.drained}"
            )
            for event in report.emitted:
                lines.append(f"{report.index}|emitted|-|-|{serialize_event(event)}|-")
            lines.extend(r.line() for r in report.records)
        lines.append("# final state")
        lines.extend(self.final_snapshot)
        return "\n".join(lines) + "\n"


@dataclass
class _Queued:
    effect: object
    rule: str
    bindings: dict


class Engine:
    """Runs one agent's reasoning loop over a scenario."""

    def __init__(
        self,
        doc: ScenarioDoc,
        owner: Optional[str] = None,
        partner: Optional[str] = None,
        theory: Optional[AppraisalTheory] = None,
        firing_cap: int = 10000,
    ):
        self.doc = doc
        self.thresholds = doc.thresholds
        self.theory = theory or default_theory()
        self.firing_cap = firing_cap
        owners_with_facts = [o for o, _ in doc.initial_facts]
        if owner is None:
            owner = owners_with_facts[0] if owners_with_facts else (doc.agents[0] if doc.agents else None)
        if owner is None:
            raise EngineError("scenario declares no agents")
        if doc.agents and owner not in doc.agents:
            raise EngineError(f"unknown agent {owner!r}; scenario declares {doc.agents}")
        self.state = MentalState(owner)
        if partner is None:
            others = [a for a in doc.agents if a != owner]
            partner = others[0] if others else None
        self.partner = partner
        self.rules = list(doc.rules)
        self.tick_index = 0
        self._queue: list[_Queued] = []
        self._pending_events: list[tuple[Event, Optional[Formula]]] = []
        self._load_facts()

    def _load_facts(self):
        for owner, phi in self.doc.initial_facts:
            if owner != self.state.owner:
                continue
            self._assert_fact(phi)

    def _assert_fact(self, phi: Formula):
        phi = canonicalize(phi)
        me = self.state.owner
        if isinstance(phi, Bel) and phi.agent == me:
            self.state.assert_belief(phi.body, phi.degree)
        elif isinstance(phi, Att) and phi.agent == me:
            self.state.assert_attitude(phi.body, phi.degree)
        elif isinstance(phi, Int) and phi.agent == me:
            self.state.add_intention(phi.body)
        elif isinstance(phi, Like) and phi.source == me and isinstance(phi.target, str):
            self.state.set_like(phi.target, phi.degree)
        elif isinstance(phi, Dom) and phi.source == me and isinstance(phi.target, str):
            self.state.set_dom(phi.target, phi.degree)
        else:
            # anything else is something the owner takes to be certainly true
            self.state.assert_belief(phi, 1.0)

    # -- the loop -------------------------------------------------------------

    def tick(self, incoming: Iterable[Event] = (), outside_facts: Iterable = ()) -> TickReport:
        """Run one reasoning cycle.

        `incoming` are events the owner witnesses this tick. `outside_facts`
        are (rule_name, content, degree) belief updates injected by the
        surrounding application (affect interpretation), logged under the
        given rule name.
        """
        t = self.tick_index
        self.tick_index += 1
        records: list[FiringRecord] = []
        stages: list[str] = []
        emitted: list[Event] = []
        incoming = list(incoming)
        fired = Counter()
        enqueued_count = 0

        def log(stage: str, firing: Firing):
            fired[firing.rule] += 1
            if sum(fired.values()) > self.firing_cap:
                worst = fired.most_common(1)[0][0]
                raise EngineError(
                    f"firing cap {self.firing_cap} exceeded at tick {t}; "
                    f"most frequent rule: {worst}"
                )
            records.append(
                FiringRecord(
                    t,
                    stage,
                    firing.rule,
                    render_bindings(firing.bindings),
                    firing.effect_text(),
                    repr(float(firing.degree)) if firing.degree is not None else "-",
                )
            )

        def enqueue(stage: str, firing: Firing):
            nonlocal enqueued_count
            log(stage, firing)
            self._queue.append(_Queued(firing.effect, firing.rule, firing.bindings))
            enqueued_count += 1

        def apply_now(stage: str, firing: Firing) -> bool:
            if firing.effect is None:
                log(stage, firing)
                return False
            if isinstance(firing.effect, IntentionEffect):
                try:
                    changed = apply_effect(self.state, firing.effect, t)
                except IntentionConflict:
                    log(
                        stage,
                        Firing(
                            "suppress_conflicting_intention",
                            dict(firing.bindings),
                            None,
                            "note",
                        ),
                    )
                    return False
                if changed:
                    log(stage, firing)
                return changed
            changed = apply_effect(self.state, firing.effect, t)
            if changed:
                log(stage, firing)
            return changed

        # drain the queue: effects enqueued at t-1 become visible now
        drained = self._drain(t, records)

        # pending self-acts land as occurred events
        for event, source in self._pending_events:
            if source is not None:
                self.state.drop_intention(source)
            emitted.append(event)
            for firing in observe_event_firings(self.state, event):
                apply_effect(self.state, firing.effect, t)
                log("update_beliefs_with_new_soa", firing)
        self._pending_events = []

        seen_events = list(emitted) + incoming

        # stage: execute intentions
        stages.append("execute_intentions")
        for firing in execute_intentions_pass(self.state):
            log("execute_intentions", firing)
            self._pending_events.append((firing.effect.event, firing.bindings["eps"]))

        # stage: simulate the other's emotions
        stages.append("simulate_others_emotions")
        predicted: list[EmotionInstance] = []
        if self.partner is not None:
            from .projection import simulate_other

            predicted, firings = simulate_other(
                self.state, self.partner, self.theory, self.thresholds, t, self.rules
            )
            for firing in firings:
                apply_now("simulate_others_emotions", firing)

        # stage: update beliefs and attitudes
        stages.append("update_beliefs_and_attitudes")
        stages.append("update_beliefs_with_new_soa")
        for event in incoming:
            for firing in observe_event_firings(self.state, event):
                apply_now("update_beliefs_with_new_soa", firing)
        for rule_name, content, degree in outside_facts:
            firing = Firing(rule_name, {"phi": content}, BeliefEffect(content, degree), "now", degree)
            apply_now("update_beliefs_with_new_soa", firing)
        stages.append("handle_operators_equivalence")

        queued_texts = set()
        while True:
            changed = 0
            firings = derive_beliefs_pass(self.state, self.thresholds)
            firings += propagate_responsibility_pass(self.state, self.thresholds)
            firings += update_attitudes_pass(self.state, self.thresholds)
            for firing in firings:
                if apply_now("update_beliefs", firing):
                    changed += 1
            for firing in contagion_pass(self.state, self.thresholds):
                key = firing.effect_text()
                if key not in queued_texts:
                    queued_texts.add(key)
                    enqueue("update_beliefs", firing)
            for rule in self.rules:
                for firing in run_scenario_rule(
                    self.state, rule, self.thresholds, self._goal_query
                ):
                    if firing.timing == "now":
                        if apply_now("update_beliefs", firing):
                            changed += 1
                    else:
                        key = firing.effect_text()
                        if key not in queued_texts:
                            queued_texts.add(key)
                            enqueue("update_beliefs", firing)
            if changed == 0:
                break

        # self-appraisal: emotions triggered now become felt next tick
        for result in appraise(
            self.state, self.theory, self.thresholds, t + 1, self._goal_query
        ):
            inst = result.instance
            bindings = {"about": inst.about, "i": inst.intensity}
            if inst.target:
                bindings["b"] = inst.target
            if result.suppressed_by is not None:
                bindings["superseded_by"] = result.suppressed_by
                log("update_beliefs", Firing(inst.kind, bindings, None, "note"))
                continue
            effect = EmotionEffect(inst.kind, inst.target, inst.intensity, inst.about)
            key = f"emo:{inst.kind}:{inst.target}:{serialize_formula(inst.about)}"
            if key not in queued_texts:
                queued_texts.add(key)
                enqueue("update_beliefs", Firing(inst.kind, bindings, effect, "next", inst.intensity))

        stages.append("adopt_new_desires")
        for firing in adopt_desires_pass(self.state, self.thresholds):
            if firing.effect is None:
                log("adopt_new_desires", firing)
                continue
            key = firing.effect_text()
            if key not in queued_texts:
                queued_texts.add(key)
                enqueue("adopt_new_desires", firing)

        stages.append("order_goals")
        goals, firings = order_goals_pass(self.state, self.thresholds)
        for firing in firings:
            log("order_goals", firing)

        # stage: adopt new intentions
        stages.append("adopt_new_intentions")
        stages.append("adopt_new_intentions_from_goals")
        queued_int: set[str] = {
            serialize_formula(q.effect.content)
            for q in self._queue
            if isinstance(q.effect, IntentionEffect)
        }
        for firing in intentions_from_goals_pass(self.state, self.thresholds, goals, queued_int):
            enqueue("adopt_new_intentions_from_goals", firing)
        stages.append("adopt_new_intentions_from_intentions")
        while True:
            firings = intentions_from_intentions_pass(self.state, self.thresholds)
            applied = 0
            for firing in firings:
                if apply_now("adopt_new_intentions_from_intentions", firing):
                    applied += 1
            if applied == 0:
                break

        # stage: speech act generation
        stages.append("generate_speech_acts")
        for firing in generate_requests_pass(self.state):
            log("generate_speech_acts", firing)
            event = firing.effect.event
            emitted.append(event)
            seen_events.append(event)
            for obs in observe_event_firings(self.state, event):
                apply_effect(self.state, obs.effect, t)

        # stage: perlocutions of received speech acts
        stages.append("apply_perlocutions")
        for firing in perlocutions_pass(self.state, seen_events, self.thresholds):
            key = firing.effect_text()
            if key not in queued_texts:
                queued_texts.add(key)
                enqueue("apply_perlocutions", firing)

        return TickReport(
            index=t,
            incoming=incoming,
            emitted=emitted,
            records=records,
            stages=stages,
            goals=goals,
            predicted=predicted,
            enqueued=enqueued_count,
            drained=drained,
        )

    def _goal_query(self, content: Formula) -> Optional[float]:
        return self.state.query_goal(content, self.thresholds)

    def _drain(self, t: int, records: list[FiringRecord]) -> int:
        drained = 0
        landed_emotions: list[EmotionInstance] = []
        for item in self._queue:
            drained += 1
            effect = item.effect
            if isinstance(effect, EmotionEffect):
                landed_emotions.append(
                    EmotionInstance(
                        effect.kind, self.state.owner, effect.target, effect.intensity,
                        effect.about, t,
                    )
                )
                continue
            if isinstance(effect, EventEffect):
                self._pending_events.append((effect.event, None))
                continue
            if isinstance(effect, IntentionEffect):
                try:
                    apply_effect(self.state, effect, t)
                except IntentionConflict:
                    records.append(
                        FiringRecord(
                            t,
                            "drain",
                            "suppress_conflicting_intention",
                            render_bindings(item.bindings),
                            f"Int:{serialize_formula(effect.content)}",
                            "-",
                        )
                    )
                continue
            apply_effect(self.state, effect, t)
        self._queue = []
        self.state.set_emotions(landed_emotions)
        return drained

    def order_goals(self):
        goals, _ = order_goals_pass(self.state, self.thresholds)
        return goals


def run_script(
    doc: ScenarioDoc,
    script: Optional[list[list[Event]]] = None,
    ticks: Optional[int] = None,
    owner: Optional[str] = None,
    theory: Optional[AppraisalTheory] = None,
) -> Trace:
    """Run a scenario against a per-tick event script; fully deterministic."""
    script = script or []
    for batch in script:
        for event in batch:
            for name in _event_agents(event):
                if name not in doc.agents:
                    raise EngineError(f"script references unknown agent {name!r}")
    engine = Engine(doc, owner=owner, theory=theory)
    nticks = ticks if ticks is not None else max(4, len(script))
    trace = Trace(scenario=doc.name, owner=engine.state.owner)
    for t in range(nticks):
        incoming = script[t] if t < len(script) else []
        trace.reports.append(engine.tick(incoming))
    trace.final_snapshot = engine.state.snapshot_lines()
    return trace


def _event_agents(event: Event):
    for slot in (event.actor, event.recipient):
        if isinstance(slot, str):
            yield slot
