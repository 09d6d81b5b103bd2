import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tomsim.logic import (
    ANY,
    And,
    Att,
    Atom,
    Bel,
    DegreeError,
    Des,
    Dom,
    Emo,
    Event,
    EventProp,
    FVar,
    Formula,
    Future,
    Globally,
    Ideal,
    Implies,
    Int,
    Like,
    Next,
    Not,
    PatternError,
    Resp,
    SpeechAct,
    Thresholds,
    Top,
    Until,
    Var,
    atoms_of,
    avg_unit,
    canonicalize,
    deg_eq,
    deg_gt,
    events_of,
    is_responsible,
    is_witness,
    match,
    overlap,
    rename_agent,
    strip_temporal_head,
    subsumes,
    substitute,
    temporal_free,
)

from astgen import random_formula

VISIT = Event("M", "J", "visiting_ht")
PICNIC = Event("M", None, "have_a_picnic")


class TestDegrees:
    def test_unit_range_enforced(self):
        Bel("a", 0.0, Atom("p"))
        Bel("a", 1.0, Atom("p"))
        with pytest.raises(DegreeError):
            Bel("a", 1.5, Atom("p"))
        with pytest.raises(DegreeError):
            Bel("a", -0.1, Atom("p"))

    def test_signed_range_enforced(self):
        Att("a", -1.0, Atom("p"))
        Att("a", 1.0, Atom("p"))
        with pytest.raises(DegreeError):
            Att("a", -1.2, Atom("p"))
        with pytest.raises(DegreeError):
            Like("a", "b", 2.0)

    def test_strictness_with_tolerance(self):
        assert not deg_gt(0.75, 0.75)
        assert deg_gt(0.76, 0.75)
        assert not deg_gt(0.75 + 5e-10, 0.75)
        assert deg_eq(0.75, 0.75 + 5e-10)

    def test_avg_unit_values(self):
        assert deg_eq(avg_unit(1, 1), 1.0)
        assert deg_eq(avg_unit(0, 0), 0.5)
        assert deg_eq(avg_unit(-1, -1), 0.0)
        assert deg_eq(avg_unit(1, 0.76), 0.94)
        assert deg_eq(avg_unit(0.6, 0.5), 0.775)
        assert deg_eq(avg_unit(0, 0, 0, 0), 0.5)

    def test_threshold_constraints(self):
        Thresholds()
        Thresholds(0.5, 0.75, 0.7)
        with pytest.raises(DegreeError):
            Thresholds(mod_th=0.4)
        with pytest.raises(DegreeError):
            Thresholds(mod_th=0.8, str_th=0.8)


class TestInvolvement:
    def test_responsible_actor(self):
        assert is_responsible("M", VISIT)
        assert not is_responsible("J", VISIT)

    def test_responsible_recipient_free(self):
        assert is_responsible("M", PICNIC)

    def test_witness_positions(self):
        assert is_witness("J", VISIT)
        assert is_witness("M", VISIT)
        assert not is_witness("K", VISIT)

    def test_wildcard_event_rejected(self):
        with pytest.raises(PatternError):
            is_responsible("M", Event(ANY, "J", "dad"))
        with pytest.raises(PatternError):
            is_witness("M", Event("M", ANY, "dad"))

    def test_responsible_implies_witness(self):
        rng = random.Random(7)
        for _ in range(200):
            actor = rng.choice("MJK")
            recipient = rng.choice(["M", "J", None])
            event = Event(actor, recipient, "act")
            for agent in "MJK":
                if is_responsible(agent, event):
                    assert is_witness(agent, event)

    def test_speech_act_needs_recipient(self):
        with pytest.raises(ValueError):
            Event("M", None, SpeechAct("Assert", Atom("p")))


class TestCanonicalize:
    def test_desire_sugar(self):
        got = canonicalize(Des("a", 0.7, Atom("p")))
        assert got == Att("a", 0.7, Future(Atom("p")))

    def test_ideal_sugar(self):
        dad = EventProp(Event(ANY, "J", "dad"))
        got = canonicalize(Ideal("J", 0.8, Not(dad)))
        # stance toward "never the dad topic" is the mirrored stance
        # toward eventually reaching it
        assert got == Att("J", -0.8, Future(dad))

    def test_ideal_and_negated_desire_identified(self):
        phi = Atom("p")
        a = canonicalize(Ideal("a", 0.8, Not(phi)))
        b = canonicalize(Des("a", -0.8, phi))
        assert a == b

    def test_double_negation(self):
        assert canonicalize(Not(Not(Atom("p")))) == Atom("p")

    def test_until_top_is_future(self):
        assert canonicalize(Until(Top(), Atom("p"))) == Future(Atom("p"))

    def test_belief_complement_folds(self):
        got = canonicalize(Bel("a", 0.2, Not(Atom("p"))))
        assert isinstance(got, Bel)
        assert got.body == Atom("p")
        assert deg_eq(got.degree, 0.8)

    def test_or_desugars(self):
        from tomsim.logic import Or

        got = canonicalize(Or(Atom("p"), Atom("q")))
        assert got == Not(And(Not(Atom("p")), Not(Atom("q"))))

    def test_idempotent_random(self):
        rng = random.Random(11)
        for _ in range(500):
            phi = random_formula(rng, 5)
            once = canonicalize(phi)
            assert canonicalize(once) == once

    def test_preserves_atoms_and_events(self):
        # events compare after canonicalizing their speech contents, since
        # canonicalize rewrites those too
        def canon_events(phi):
            return {canonicalize(EventProp(e)).event for e in events_of(phi)}

        rng = random.Random(13)
        for _ in range(500):
            phi = random_formula(rng, 5)
            got = canonicalize(phi)
            assert atoms_of(got) == atoms_of(phi)
            assert canon_events(got) == canon_events(phi)


class TestMatch:
    def test_modal_pattern(self):
        pattern = Bel(Var("a"), Var("l"), FVar("phi"))
        target = Bel("M", 0.8, EventProp(VISIT))
        env = match(pattern, target)
        assert env == {"a": "M", "l": 0.8, "phi": EventProp(VISIT)}

    def test_wildcard_event(self):
        pattern = EventProp(Event(ANY, "J", "dad"))
        target = EventProp(Event("M", "J", "dad"))
        assert match(pattern, target) == {}

    def test_operator_mismatch(self):
        assert match(Int(Var("a"), FVar("phi")), Bel("M", 1.0, Atom("p"))) is None

    def test_inconsistent_binding_fails(self):
        pattern = And(FVar("x"), FVar("x"))
        assert match(pattern, And(Atom("p"), Atom("q"))) is None
        assert match(pattern, And(Atom("p"), Atom("p"))) == {"x": Atom("p")}

    def test_substitution_soundness(self):
        rng = random.Random(17)
        pattern = canonicalize(Bel(Var("a"), Var("l"), FVar("phi")))
        for _ in range(300):
            body = canonicalize(random_formula(rng, 3))
            if isinstance(body, Not):
                continue
            target = Bel(rng.choice("MJ"), round(rng.uniform(0, 1), 3), body)
            env = match(pattern, target)
            assert env is not None
            rebuilt = substitute(env, pattern)
            assert rebuilt == canonicalize(target)

    def test_overlap_and_subsume(self):
        broad = EventProp(Event("M", ANY, "dad"))
        narrow = EventProp(Event("M", "J", "dad"))
        other = EventProp(Event(ANY, "J", "dad"))
        assert subsumes(broad, narrow)
        assert not subsumes(narrow, broad)
        assert overlap(broad, other)
        assert overlap(narrow, narrow)
        assert not overlap(narrow, EventProp(Event("J", "J", "dad")))


class TestHelpers:
    def test_temporal_free(self):
        assert temporal_free(And(Atom("p"), Not(Atom("q"))))
        assert not temporal_free(Future(Atom("p")))
        with pytest.raises(ValueError):
            Emo("Joy", "a", None, 0.5, Future(Atom("p")))

    def test_strip_temporal_head(self):
        assert strip_temporal_head(Future(Atom("p"))) == Atom("p")
        assert strip_temporal_head(Globally(Atom("p"))) == Atom("p")
        assert strip_temporal_head(Not(Future(Atom("p")))) == Not(Atom("p"))
        assert strip_temporal_head(Atom("p")) == Atom("p")

    def test_rename_agent(self):
        phi = Bel("self", 0.8, Ideal("b", 0.5, EventProp(Event("self", "b", "act"))))
        got = rename_agent(phi, "self", "M")
        assert got == Bel("M", 0.8, Ideal("b", 0.5, EventProp(Event("M", "b", "act"))))


@settings(max_examples=200)
@given(st.floats(min_value=-1, max_value=1), st.floats(min_value=-1, max_value=1))
def test_avg_unit_stays_in_unit_interval(a, b):
    v = avg_unit(a, b)
    assert 0.0 <= v <= 1.0


@settings(max_examples=200)
@given(st.floats(min_value=0, max_value=1))
def test_belief_negation_complement(l):
    got = canonicalize(Bel("a", l, Not(Atom("p"))))
    assert deg_eq(got.degree + l, 1.0)
