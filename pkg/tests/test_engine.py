import random

import pytest

from tomsim.engine import Engine, EngineError, run_script
from tomsim.inference import RULE_CATALOG
from tomsim.logic import Event, SpeechAct, Atom, deg_eq
from tomsim.parsing import parse_formula
from tomsim.scenario import parse_scenario

VHT = parse_formula("<M,J,visiting_ht>")
VHD = parse_formula("<M,J,visiting_ht_and_dad>")


def rules_fired(trace, tick=None):
    out = []
    for report in trace.reports:
        if tick is not None and report.index != tick:
            continue
        out.extend(r.rule for r in report.records)
    return out


class TestHolidayScenario:
    def test_derivation_chain_order(self, maryjohn_doc):
        trace = run_script(maryjohn_doc, ticks=4)
        fired = rules_fired(trace)
        chain = ["derive_belief", "adopt_desire", "block_weakly_inconsistent_desire", "admit_goal"]
        positions = []
        cursor = 0
        for name in chain:
            while cursor < len(fired) and fired[cursor] != name:
                cursor += 1
            assert cursor < len(fired), f"{name} missing after {positions}"
            positions.append(cursor)
        assert positions == sorted(positions)

    def test_goal_values(self, maryjohn_doc):
        trace = run_script(maryjohn_doc, ticks=2)
        goals = dict(trace.reports[-1].goals)
        assert deg_eq(goals[VHT], 0.77)
        assert VHD not in goals

    def test_intention_by_tick_two_event_on_three(self, maryjohn_doc):
        engine = Engine(maryjohn_doc)
        reports = [engine.tick() for _ in range(4)]
        assert engine.state.has_intention(VHT) or reports[3].emitted
        # the act itself lands at tick 3
        assert reports[0].emitted == [] and reports[1].emitted == [] and reports[2].emitted == []
        assert reports[3].emitted == [VHT.event]

    def test_intention_holds_through_tick_two(self, maryjohn_doc):
        engine = Engine(maryjohn_doc)
        engine.tick()
        engine.tick()
        report = engine.tick()  # tick 2
        assert report.index == 2
        assert engine.state.has_intention(VHT)


class TestTickMechanics:
    def test_empty_state_no_firings(self):
        doc = parse_scenario("agents A B\nstate A { }\n")
        engine = Engine(doc)
        report = engine.tick()
        assert report.records == []
        assert report.goals == []

    def test_next_effects_invisible_same_tick(self):
        doc = parse_scenario(
            "agents A B\n"
            "state A { Bel(A,0.9,seed) }\n"
            "rule wish {\n"
            "  when Bel(self, ?l, seed) if ?l > str_th\n"
            "  then next Des(self, 0.9, prize)\n"
            "}\n"
        )
        engine = Engine(doc)
        engine.tick()
        assert engine.state.attitude(parse_formula("F(prize)")) is None
        engine.tick()
        assert deg_eq(engine.state.attitude(parse_formula("F(prize)")), 0.9)

    def test_queue_counts_balance(self, maryjohn_doc):
        engine = Engine(maryjohn_doc)
        previous = engine.tick()
        for _ in range(3):
            report = engine.tick()
            assert report.drained == previous.enqueued
            previous = report

    def test_stage_markers_in_printed_order(self, maryjohn_doc):
        engine = Engine(maryjohn_doc)
        report = engine.tick()
        want = [
            "execute_intentions",
            "simulate_others_emotions",
            "update_beliefs_and_attitudes",
            "update_beliefs_with_new_soa",
            "handle_operators_equivalence",
            "adopt_new_desires",
            "order_goals",
            "adopt_new_intentions",
            "adopt_new_intentions_from_goals",
            "adopt_new_intentions_from_intentions",
            "generate_speech_acts",
            "apply_perlocutions",
        ]
        assert report.stages == want

    def test_firing_cap_identifies_runaway_rule(self):
        doc = parse_scenario(
            "agents A B\n"
            "state A { Bel(A,0.9,seed) }\n"
            "rule runaway {\n"
            "  when Bel(self, ?l, ?x) if ?l > mod_th\n"
            "  then now Bel(self, 0.9, N(?x))\n"
            "}\n"
        )
        engine = Engine(doc, firing_cap=80)
        with pytest.raises(RuntimeError) as err:
            engine.tick()
        assert "runaway" in str(err.value)

    def test_oscillating_rules_hit_the_cap(self):
        doc = parse_scenario(
            "agents A B\n"
            "state A { Bel(A,0.9,pong) }\n"
            "rule down {\n"
            "  when Bel(self, ?l, pong) if ?l > 0.85\n"
            "  then now Bel(self, 0.8, pong)\n"
            "}\n"
            "rule up {\n"
            "  when Bel(self, ?l, pong) if ?l <= 0.85\n"
            "  then now Bel(self, 0.9, pong)\n"
            "}\n"
        )
        engine = Engine(doc, firing_cap=40)
        with pytest.raises(EngineError) as err:
            engine.tick()
        assert "down" in str(err.value) or "up" in str(err.value)

    def test_script_with_unknown_agent_rejected(self, maryjohn_doc):
        with pytest.raises(EngineError):
            run_script(maryjohn_doc, [[Event("Z", "M", "wave")]])

    def test_goal_ordering_policy(self):
        doc = parse_scenario(
            "agents A B\n"
            "state A {\n"
            "  Des(A,0.9,strong)\n  Bel(A,0.9,F(strong))\n"
            "  Des(A,0.8,weak)\n  Bel(A,0.9,F(weak))\n"
            "  Des(A,0.8,also_weak)\n  Bel(A,0.9,F(also_weak))\n"
            "}\n"
        )
        engine = Engine(doc)
        report = engine.tick()
        names = [g[0] for g in report.goals]
        assert names == [Atom("strong"), Atom("also_weak"), Atom("weak")]


class TestTraceDeterminism:
    def test_holiday_replay_byte_identical(self, maryjohn_doc):
        a = run_script(maryjohn_doc, ticks=4).text()
        b = run_script(maryjohn_doc, ticks=4).text()
        assert a == b

    def test_trace_contains_goal_record(self, maryjohn_doc):
        text = run_script(maryjohn_doc, ticks=4).text()
        assert "admit_goal" in text
        assert "0.77" in text

    def test_empty_script_zero_ticks_is_header_only(self, maryjohn_doc):
        text = run_script(maryjohn_doc, ticks=0).text()
        lines = [l for l in text.splitlines() if l]
        assert lines[0].startswith("# tom-trace")
        assert all(l.startswith("#") or "|" not in l for l in lines)

    def test_rule_names_are_documented(self, maryjohn_doc, interview_doc):
        known = set(RULE_CATALOG)
        known.update(r.name for r in maryjohn_doc.rules)
        known.update(("Joy", "Fear", "Gloating", "Admiration", "Gratitude"))
        trace = run_script(maryjohn_doc, ticks=4)
        for record in trace.record_lines():
            rule = record.split("|")[2]
            assert rule in known or rule.startswith("tt:") or rule in (
                "simulate_other",
                "predict_impact",
            )


def random_scenario(rng: random.Random) -> str:
    atoms = [f"p{i}" for i in range(4)]
    lines = ["agents A B", "state A {"]
    for _ in range(rng.randrange(2, 7)):
        kind = rng.randrange(4)
        atom = rng.choice(atoms)
        degree = round(rng.choice([0.2, 0.4, 0.6, 0.8, 0.9, 1.0]), 3)
        if kind == 0:
            lines.append(f"  Bel(A,{degree},{atom})")
        elif kind == 1:
            lines.append(f"  Des(A,{round(rng.uniform(-1, 1), 2)},{atom})")
        elif kind == 2:
            other = rng.choice(atoms)
            lines.append(f"  Bel(A,{degree},{atom} -> F({other}))")
        else:
            lines.append(f"  Bel(A,{degree},F({atom}))")
    if rng.random() < 0.7:
        lines.append(f"  Like(A,B,{round(rng.uniform(-1, 1), 2)})")
        lines.append(f"  Dom(A,B,{round(rng.uniform(-1, 1), 2)})")
    if rng.random() < 0.5:
        lines.append(f"  Bel(A,0.9,Des(B,{round(rng.uniform(-1, 1), 2)},{rng.choice(atoms)}))")
    lines.append("}")
    if rng.random() < 0.5:
        lines.append(
            "rule echo {\n  when Bel(self, ?l, Des(?b, ?k, ?phi)) if ?l > str_th\n"
            "  then next Des(self, ?k, ?phi)\n}"
        )
    return "\n".join(lines)


def random_script(rng: random.Random):
    script = []
    for _ in range(rng.randrange(0, 3)):
        batch = []
        if rng.random() < 0.7:
            content = Atom(rng.choice(["p0", "p1", "p2"]))
            ill = rng.choice(["Assert", "Request"])
            batch.append(Event("B", "A", SpeechAct(ill, content)))
        script.append(batch)
    return script


class TestRandomizedDeterminism:
    def test_fifty_seeded_scenarios_replay_identically(self):
        for seed in range(50):
            rng = random.Random(seed)
            doc = parse_scenario(random_scenario(rng), name=f"random-{seed}")
            script = random_script(rng)
            first = run_script(doc, script, ticks=5).text()
            second = run_script(doc, script, ticks=5).text()
            assert first == second, f"seed {seed} diverged"
